#ifndef PHKIN_KERNELS_HPP
#define PHKIN_KERNELS_HPP

#include "phkin/quadrature.hpp"

namespace phkin {

/// Equilibrium mode phi(k) = k^2 / sinh k. Series below 1e-4, scaled
/// exponential form above 30 so no overflow occurs for k <= 700.
double phi(double k);

/// Normalized equilibrium mode phi0 = (sqrt(30)/pi^2) phi; unit L^2 norm
/// on (0, inf).
double phi0(double k);

/// Collision frequency Gamma(k): split form
///   sinh k [ int_0^k phi(k-u) phi(u) du + 2 int_0^inf phi(k+u) phi(u) du ]
/// evaluated through the cancellation-free rewrite
///   sinh k phi(a) phi(b) = 2 (1-e^{-2k}) g(a) g(b) e^{-2u-correction},
/// g(x) = x^2/(1-e^{-2x}), which stays in range for any k.
/// Gamma(0) = 0 and Gamma(k) > 0 for k > 0; behaves like pi^4 k/15 near 0
/// and k^5/15 at infinity.
double collision_frequency(double k, const QuadratureConfig& cfg);

/// Scattering kernel K(k, k') = (phi(|k-k'|) - phi(k+k')) k k'.
/// Exactly symmetric under argument swap; zero when either argument is 0.
double kernel_K(double k, double k2);

/// K(k, k') / sqrt(Gamma(k) Gamma(k')); finite limit 0 as both args -> 0.
double weighted_kernel(double k, double k2, const QuadratureConfig& cfg);

/// int_0^inf K(k, k')^2 dk'; strictly below (4/15) pi^4 k^4 + (4/21) pi^6 k^2.
double row_norm_sq(double k, const QuadratureConfig& cfg);

/// Hilbert-Schmidt norm of the Gamma-weighted kernel over (0, tail_cutoff)^2.
struct HsNorm {
    double value;          ///< C0
    double tail_estimate;  ///< crude estimate of the mass beyond the cutoff
};
HsNorm hs_norm_c0(const QuadratureConfig& cfg);

/// Fast lookup of Gamma(k) on a log-log monotone-cubic table; below the
/// table range the linear small-k asymptote is used. Pure after build.
class CollisionFrequencyTable {
public:
    CollisionFrequencyTable(const QuadratureConfig& cfg, double k_lo,
                            double k_hi, int points_per_decade = 48);
    double operator()(double k) const;
    double k_lo() const { return k_lo_; }
    double k_hi() const { return k_hi_; }

private:
    double k_lo_, k_hi_;
    std::vector<double> log_k_, log_gamma_, slope_;
};

/// Arguments of the auxiliary integral Z(t, theta, rho)
/// = int_0^t (s+1)^{-theta} e^{rho s} ds.
struct HopitalArgs {
    double t;
    double theta;
    double rho;
    void validate() const;
};

/// Z evaluated by quadrature in the representation mantissa * e^{rho t}.
ScaledExp hopital_z(const HopitalArgs& args, const QuadratureConfig& cfg);

/// Upper bound [2^theta (t+1)^{-theta} + 3 e^{-rho t/3}] e^{rho t} / rho
/// in the same scaled representation; hopital_z <= hopital_bound always.
ScaledExp hopital_bound(const HopitalArgs& args);

}  // namespace phkin

#endif
