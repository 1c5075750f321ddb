#ifndef PHKIN_QUADRATURE_HPP
#define PHKIN_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "phkin/common.hpp"

namespace phkin {

/// Tolerances and truncation policy shared by all quadrature-backed
/// evaluations. Semi-infinite integrands handled here decay at least like
/// (2k^2 e^{-k})^2 past tail_cutoff; the constructor certifies that the
/// closed-form tail integral of that envelope is below abs_tol.
struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double tail_cutoff = 60.0;
    int max_panels = 512;

    QuadratureConfig() { validate(); }
    QuadratureConfig(double abs_tol_, double rel_tol_, double tail_cutoff_,
                     int max_panels_)
        : abs_tol(abs_tol_),
          rel_tol(rel_tol_),
          tail_cutoff(tail_cutoff_),
          max_panels(max_panels_) {
        validate();
    }

    void validate() const;
};

/// Closed form of the tail integral  int_T^inf x^m e^{-2x} dx.
double tail_poly_exp(double t, int m);

/// Globally adaptive Gauss-Kronrod (7,15) integration of f over [a, b].
/// Panels with the largest error estimate are bisected first; throws
/// QuadratureError if the tolerance is not met within cfg.max_panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg);

/// Same, with user-supplied initial panel breakpoints (strictly increasing).
double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints,
                 const QuadratureConfig& cfg);

/// Gauss-Legendre nodes and weights on [-1, 1], n >= 1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Value represented as mantissa * exp(log_scale); keeps quantities like
/// e^{rho t} for rho*t up to 1e6 out of the floating-point range.
struct ScaledExp {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double value() const { return mantissa * std::exp(log_scale); }

    /// Compare two values sharing a common scale convention.
    static bool leq(const ScaledExp& a, const ScaledExp& b) {
        if (a.log_scale == b.log_scale) return a.mantissa <= b.mantissa;
        // Rescale through the midpoint to limit overflow.
        double mid = 0.5 * (a.log_scale + b.log_scale);
        return a.mantissa * std::exp(a.log_scale - mid) <=
               b.mantissa * std::exp(b.log_scale - mid);
    }
};

}  // namespace phkin

#endif
