#include "phkin/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace phkin {

namespace {

constexpr double kPhi0Scale = 0.55495897834031846;  // sqrt(30)/pi^2
constexpr double kGammaSmallK = 6.4939394022668291; // pi^4/15

void require_wavenumber(double k, const char* who) {
    if (!std::isfinite(k) || k < 0.0)
        throw DomainError(std::string(who) + ": wavenumber must be finite and >= 0");
}

/// g(x) = x^2 / (1 - e^{-2x}) for x >= 0, with g(0) = 0.
inline double half_exp_ratio(double x) {
    if (x == 0.0) return 0.0;
    return x * x / (-std::expm1(-2.0 * x));
}

/// Runtime-certified upper cutoff for the Gamma tail: smallest T >= minimum
/// with 4 [tail(T,4) + 2k tail(T,3) + k^2 tail(T,2)] <= tol.
double gamma_tail_cutoff(double k, double t0, double tol) {
    double t = t0;
    for (; t <= 800.0; t += 10.0) {
        double bound = 4.0 * (tail_poly_exp(t, 4) + 2.0 * k * tail_poly_exp(t, 3) +
                              k * k * tail_poly_exp(t, 2));
        if (bound <= tol) return t;
    }
    throw QuadratureError("collision_frequency: cannot certify tail cutoff");
}

}  // namespace

double phi(double k) {
    require_wavenumber(k, "phi");
    if (k == 0.0) return 0.0;
    if (k < 1e-4) {
        // k^2/sinh k = k (1 - k^2/6 + 7 k^4/360 - ...)
        double k2 = k * k;
        return k * (1.0 - k2 / 6.0 + 7.0 * k2 * k2 / 360.0);
    }
    if (k <= 30.0) return k * k / std::sinh(k);
    // 2 k^2 e^{-k} / (1 - e^{-2k}); exact rewrite, no overflow up to k ~ 700.
    return 2.0 * k * k * std::exp(-k) / (-std::expm1(-2.0 * k));
}

double phi0(double k) { return kPhi0Scale * phi(k); }

double kernel_K(double k, double k2) {
    require_wavenumber(k, "kernel_K");
    require_wavenumber(k2, "kernel_K");
    return (phi(std::abs(k - k2)) - phi(k + k2)) * (k * k2);
}

double collision_frequency(double k, const QuadratureConfig& cfg) {
    require_wavenumber(k, "collision_frequency");
    if (k == 0.0) return 0.0;
    const double pref = -std::expm1(-2.0 * k);  // 1 - e^{-2k}

    // Finite part: sinh k int_0^k phi(k-u) phi(u) du
    //            = 2 (1-e^{-2k}) int_0^k g(k-u) g(u) du.
    auto finite_integrand = [&](double u) {
        return 2.0 * pref * half_exp_ratio(k - u) * half_exp_ratio(u);
    };
    std::vector<double> breaks = {0.0, 0.5 * k, k};
    if (k > 12.0) breaks = {0.0, 6.0, 0.5 * k, k - 6.0, k};
    double finite_part = integrate(finite_integrand, breaks, cfg);

    // Semi-infinite part: sinh k int_0^inf phi(k+u) phi(u) du
    //                   = 2 (1-e^{-2k}) int_0^inf g(k+u) g(u) e^{-2u} du.
    auto tail_integrand = [&](double u) {
        return 2.0 * pref * half_exp_ratio(k + u) * half_exp_ratio(u) *
               std::exp(-2.0 * u);
    };
    double cut = gamma_tail_cutoff(k, cfg.tail_cutoff, cfg.abs_tol);
    std::vector<double> tbreaks = {0.0, 3.0, 10.0, 30.0};
    while (tbreaks.back() >= cut) tbreaks.pop_back();
    tbreaks.push_back(cut);
    double semi_part = integrate(tail_integrand, tbreaks, cfg);

    return finite_part + 2.0 * semi_part;
}

double weighted_kernel(double k, double k2, const QuadratureConfig& cfg) {
    if (!std::isfinite(k) || !std::isfinite(k2) || k <= 0.0 || k2 <= 0.0)
        throw DomainError("weighted_kernel: arguments must be finite and > 0");
    return kernel_K(k, k2) /
           std::sqrt(collision_frequency(k, cfg) * collision_frequency(k2, cfg));
}

double row_norm_sq(double k, const QuadratureConfig& cfg) {
    if (!std::isfinite(k) || k <= 0.0)
        throw DomainError("row_norm_sq: wavenumber must be finite and > 0");
    auto integrand = [&](double u) {
        double v = kernel_K(k, u);
        return v * v;
    };
    // Certify the tail: past T, K^2 <= 4 k^2 (v+k)^2 v^4 e^{-2v}, v = u-k.
    double t = std::max(cfg.tail_cutoff, k + 10.0);
    for (; t <= 800.0 + k; t += 10.0) {
        double v = t - k;
        double bound =
            4.0 * k * k *
            (tail_poly_exp(v, 6) + 2.0 * k * tail_poly_exp(v, 5) +
             k * k * tail_poly_exp(v, 4));
        if (bound <= cfg.abs_tol) break;
    }
    std::vector<double> breaks = {0.0, k};
    for (double b : {k + 3.0, k + 10.0, k + 30.0})
        if (b < t) breaks.push_back(b);
    breaks.push_back(t);
    return integrate(integrand, breaks, cfg);
}

CollisionFrequencyTable::CollisionFrequencyTable(const QuadratureConfig& cfg,
                                                 double k_lo, double k_hi,
                                                 int points_per_decade)
    : k_lo_(k_lo), k_hi_(k_hi) {
    if (!(0.0 < k_lo && k_lo < k_hi) || points_per_decade < 4)
        throw InvalidSpecError("CollisionFrequencyTable: bad range");
    const double lo = std::log(k_lo), hi = std::log(k_hi);
    const int n = std::max(
        8, static_cast<int>(std::ceil((hi - lo) / std::log(10.0) *
                                      points_per_decade)) + 1);
    log_k_.resize(n);
    log_gamma_.resize(n);
    for (int i = 0; i < n; ++i) {
        log_k_[i] = lo + (hi - lo) * i / (n - 1);
        log_gamma_[i] =
            std::log(collision_frequency(std::exp(log_k_[i]), cfg));
    }
    // Monotone-cubic (Fritsch-Carlson) slopes in log-log space.
    slope_.resize(n);
    std::vector<double> d(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        d[i] = (log_gamma_[i + 1] - log_gamma_[i]) / (log_k_[i + 1] - log_k_[i]);
    slope_[0] = d[0];
    slope_[n - 1] = d[n - 2];
    for (int i = 1; i + 1 < n; ++i)
        slope_[i] = (d[i - 1] * d[i] <= 0.0)
                        ? 0.0
                        : 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
}

double CollisionFrequencyTable::operator()(double k) const {
    require_wavenumber(k, "CollisionFrequencyTable");
    if (k <= k_lo_) return kGammaSmallK * k;
    if (k > k_hi_)
        throw DomainError("CollisionFrequencyTable: k above table range");
    double x = std::log(k);
    auto it = std::upper_bound(log_k_.begin(), log_k_.end(), x);
    std::size_t i = std::min<std::size_t>(log_k_.size() - 2,
                                          it - log_k_.begin() - 1);
    double h = log_k_[i + 1] - log_k_[i];
    double s = (x - log_k_[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    double y = h00 * log_gamma_[i] + h * h10 * slope_[i] +
               h01 * log_gamma_[i + 1] + h * h11 * slope_[i + 1];
    return std::exp(y);
}

HsNorm hs_norm_c0(const QuadratureConfig& cfg) {
    const double T = cfg.tail_cutoff;
    CollisionFrequencyTable gamma_table(cfg, 1e-8, T);

    QuadratureConfig inner_cfg(1e-14, 1e-9, cfg.tail_cutoff, cfg.max_panels);
    auto w2 = [&](double a, double b) {
        double v = kernel_K(a, b);
        return v * v / (gamma_table(a) * gamma_table(b));
    };
    // By symmetry C0^2 = 2 int_0^T dk int_0^k dk' w(k,k')^2; the inner
    // variable v = k - k' keeps the |k-k'| kink at the boundary.
    auto row_mass = [&](double k) {
        if (k <= 0.0) return 0.0;
        auto inner = [&](double v) { return w2(k, k - v); };
        std::vector<double> ib = {0.0};
        for (double b : {3.0, 10.0, 30.0})
            if (b < k) ib.push_back(b);
        ib.push_back(k);
        return integrate(inner, ib, inner_cfg);
    };
    QuadratureConfig outer_cfg(1e-12, 1e-8, cfg.tail_cutoff, cfg.max_panels);
    std::vector<double> ob = {0.0, 0.5, 2.0, 8.0};
    while (ob.back() >= T) ob.pop_back();
    ob.push_back(T);
    double c0_sq = 2.0 * integrate(row_mass, ob, outer_cfg);

    // Row mass decays roughly like k^{-6}; integrate that model past T.
    double tail_sq = 2.0 * row_mass(T) * T / 5.0;
    return {std::sqrt(c0_sq), std::sqrt(tail_sq)};
}

void HopitalArgs::validate() const {
    if (!std::isfinite(t) || t < 0.0)
        throw DomainError("HopitalArgs: t must be finite and >= 0");
    if (!std::isfinite(theta) || theta < 0.0)
        throw DomainError("HopitalArgs: theta must be finite and >= 0");
    if (!std::isfinite(rho) || rho <= 0.0)
        throw DomainError("HopitalArgs: rho must be finite and > 0");
}

ScaledExp hopital_z(const HopitalArgs& args, const QuadratureConfig& cfg) {
    args.validate();
    const double rt = args.rho * args.t;
    if (rt > 1e6)
        throw NumericalError("hopital_z: rho*t exceeds scaled range (1e6)");
    if (args.t == 0.0) return {0.0, 0.0};
    // Z e^{-rho t} = int_0^t (t - u + 1)^{-theta} e^{-rho u} du.
    auto integrand = [&](double u) {
        return std::pow(args.t - u + 1.0, -args.theta) *
               std::exp(-args.rho * u);
    };
    double u_cut = std::min(args.t, (std::log(1.0 / cfg.abs_tol) + 10.0) / args.rho);
    std::vector<double> breaks = {0.0};
    for (double b : {1.0 / args.rho, 5.0 / args.rho})
        if (b < u_cut) breaks.push_back(b);
    breaks.push_back(u_cut);
    return {integrate(integrand, breaks, cfg), rt};
}

ScaledExp hopital_bound(const HopitalArgs& args) {
    args.validate();
    const double rt = args.rho * args.t;
    double mantissa = (std::pow(2.0, args.theta) *
                           std::pow(args.t + 1.0, -args.theta) +
                       3.0 * std::exp(-rt / 3.0)) /
                      args.rho;
    return {mantissa, rt};
}

}  // namespace phkin
