#ifndef PHKIN_TESTS_ORACLES_HPP
#define PHKIN_TESTS_ORACLES_HPP

// Independent oracles used by the tests. These deliberately avoid the
// library's quadrature engine and scaled evaluation paths: plain formulas,
// composite trapezoid sums, and an eigendecomposition-based propagator.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>

#include "phkin/collision_operator.hpp"

namespace oracle {

inline double phi_ref(double k) { return k == 0.0 ? 0.0 : k * k / std::sinh(k); }

/// Composite trapezoid on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, std::int64_t n) {
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (std::int64_t j = 1; j < n; ++j) sum += f(a + j * h);
    return sum * h;
}

/// Gamma(k) from its defining split form by dense trapezoid sums:
/// sinh k [ int_0^k phi(k-u) phi(u) du + 2 int_0^60 phi(k+u) phi(u) du ].
inline double gamma_trapezoid(double k) {
    double finite =
        trapezoid([k](double u) { return phi_ref(k - u) * phi_ref(u); }, 0.0, k,
                  1 << 20);
    double semi =
        trapezoid([k](double u) { return phi_ref(k + u) * phi_ref(u); }, 0.0,
                  60.0, 4'000'000);
    return std::sinh(k) * (finite + 2.0 * semi);
}

/// int_0^80 K(k,u)^2 du by dense trapezoid (interval count chosen so the
/// |k-u| kink lands on a grid point for integer k).
inline double row_norm_sq_trapezoid(double k) {
    auto f = [k](double u) {
        double v = (phi_ref(std::abs(k - u)) - phi_ref(k + u)) * k * u;
        return v * v;
    };
    return trapezoid(f, 0.0, 80.0, 4'000'000);
}

/// Exact action of e^{t E_h} through the eigendecomposition of the
/// sqrt(w)-symmetrized operator.
class MatrixExponential {
public:
    explicit MatrixExponential(const phkin::DiscreteOperator& op)
        : sqrt_w_(op.sqrt_w), solver_(op.symmetric_dense()) {}

    Eigen::VectorXd apply(double t, const Eigen::VectorXd& f) const {
        Eigen::VectorXd fhat = sqrt_w_.cwiseProduct(f);
        Eigen::VectorXd coef = solver_.eigenvectors().transpose() * fhat;
        coef.array() *= (t * solver_.eigenvalues().array()).exp();
        return (solver_.eigenvectors() * coef).cwiseQuotient(sqrt_w_);
    }

private:
    Eigen::VectorXd sqrt_w_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

/// Deterministic uniform(-1, 1), independent of libstdc++ distributions.
inline double uniform_pm1(std::uint64_t& state) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    std::uint64_t x = state;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return 2.0 * ((x >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace oracle

#endif
