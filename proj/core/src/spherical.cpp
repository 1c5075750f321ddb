#include "phkin/spherical.hpp"

#include <algorithm>
#include <cmath>

#include "phkin/kernels.hpp"

namespace phkin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFourPi = 12.566370614359172953850573533118;

/// Orthonormal associated Legendre values N_{lm} P_l^m(u) for all l <= l_max
/// at fixed order m (no Condon-Shortley phase). out[l] valid for l >= m.
void normalized_alf_column(int l_max, int m, double u, std::vector<double>& out) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    double pmm = std::sqrt(1.0 / kFourPi);
    for (int q = 1; q <= m; ++q)
        pmm *= s * std::sqrt((2.0 * q + 1.0) / (2.0 * q));
    out[m] = pmm;
    if (m == l_max) return;
    double pm1 = std::sqrt(2.0 * m + 3.0) * u * pmm;
    out[m + 1] = pm1;
    for (int l = m + 2; l <= l_max; ++l) {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                             (4.0 * double(l - 1) * (l - 1) - 1.0));
        double pl = a * (u * pm1 - b * pmm);
        pmm = pm1;
        pm1 = pl;
        out[l] = pl;
    }
}

}  // namespace

double PhysicalParams::sound_speed() const { return std::sqrt(g * n_c / m); }

double PhysicalParams::momentum_scale() const {
    return 2.0 * k_b * temperature / sound_speed();
}

void PhysicalParams::validate() const {
    for (double v : {g, n_c, m, k_b, temperature})
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidSpecError("PhysicalParams: all fields must be > 0");
}

double wavenumber(const PhysicalParams& params, double r) {
    if (!std::isfinite(r) || r < 0.0)
        throw DomainError("wavenumber: momentum must be finite and >= 0");
    return r / params.momentum_scale();
}

double momentum(const PhysicalParams& params, double k) {
    if (!std::isfinite(k) || k < 0.0)
        throw DomainError("momentum: wavenumber must be finite and >= 0");
    return params.momentum_scale() * k;
}

double occupancy(double k) {
    if (!std::isfinite(k) || k <= 0.0)
        throw DomainError("occupancy: wavenumber must be finite and > 0");
    return 1.0 / std::expm1(2.0 * k);
}

double occupancy_pair(double k) {
    if (!std::isfinite(k) || k <= 0.0)
        throw DomainError("occupancy_pair: wavenumber must be finite and > 0");
    double q = -std::expm1(-2.0 * k);  // 1 - e^{-2k}
    return std::exp(-2.0 * k) / (q * q);
}

double legendre(int n, double x) {
    if (n < 0 || n > 64) throw DomainError("legendre: degree must be in [0, 64]");
    if (!std::isfinite(x) || std::abs(x) > 1.0)
        throw DomainError("legendre: argument must lie in [-1, 1]");
    if (n == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double real_spherical_harmonic(int ell, int m, double u, double phi_az) {
    if (ell < 0 || std::abs(m) > ell)
        throw DomainError("real_spherical_harmonic: need |m| <= l");
    if (!std::isfinite(u) || std::abs(u) > 1.0)
        throw DomainError("real_spherical_harmonic: u must lie in [-1, 1]");
    std::vector<double> col(ell + 1);
    normalized_alf_column(ell, std::abs(m), u, col);
    double base = col[ell];
    if (m == 0) return base;
    double factor = std::sqrt(2.0) * base;
    return (m > 0) ? factor * std::cos(m * phi_az)
                   : factor * std::sin(-m * phi_az);
}

SphericalField SphericalField::zero(const PhysicalParams& params, int l_max,
                                    const RadialGrid& grid) {
    params.validate();
    if (l_max < 0) throw InvalidSpecError("SphericalField: l_max must be >= 0");
    SphericalField field;
    field.params = params;
    field.l_max = l_max;
    const double scale = params.momentum_scale();
    field.r_nodes.resize(grid.size());
    field.r_weights.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        field.r_nodes[i] = scale * grid.nodes[i];
        field.r_weights[i] = scale * grid.weights[i];
    }
    field.modes.reserve((l_max + 1) * (l_max + 1));
    for (int l = 0; l <= l_max; ++l)
        for (int m = -l; m <= l; ++m)
            field.modes.push_back({l, m, Eigen::VectorXd::Zero(grid.size())});
    return field;
}

int SphericalField::mode_index(int ell, int m) const {
    if (ell < 0 || ell > l_max || std::abs(m) > ell)
        throw DomainError("SphericalField: mode (l, m) out of range");
    return ell * ell + (m + ell);
}

Mode& SphericalField::at(int ell, int m) { return modes[mode_index(ell, m)]; }
const Mode& SphericalField::at(int ell, int m) const {
    return modes[mode_index(ell, m)];
}

void SphericalField::require_compatible(const RadialGrid& grid) const {
    if (grid.size() != n_radial())
        throw GridError("SphericalField: radial size != wavenumber grid size");
    for (int i = 0; i < grid.size(); ++i) {
        double k = wavenumber(params, r_nodes[i]);
        if (std::abs(k - grid.nodes[i]) > 1e-10 * (1.0 + grid.nodes[i]))
            throw GridError("SphericalField: radial grid does not map onto "
                            "the wavenumber grid at node " + std::to_string(i));
    }
}

Eigen::VectorXd to_radial(const SphericalField& field, const Mode& mode) {
    if (mode.radial.size() != field.n_radial())
        throw GridError("to_radial: mode length != radial grid");
    Eigen::VectorXd f(field.n_radial());
    for (int i = 0; i < f.size(); ++i) {
        double k = wavenumber(field.params, field.r_nodes[i]);
        f[i] = phi(k) * mode.radial[i] / k;  // k Omega / sinh k
    }
    return f;
}

Eigen::VectorXd from_radial(const SphericalField& field,
                            const Eigen::VectorXd& f) {
    if (f.size() != field.n_radial())
        throw GridError("from_radial: vector length != radial grid");
    Eigen::VectorXd omega(field.n_radial());
    for (int i = 0; i < f.size(); ++i) {
        double k = wavenumber(field.params, field.r_nodes[i]);
        omega[i] = f[i] * k / phi(k);  // sinh k / k
    }
    return omega;
}

AngularGrid AngularGrid::for_band_limit(int l_max) {
    if (l_max < 0) throw InvalidSpecError("AngularGrid: l_max must be >= 0");
    AngularGrid angular;
    const GaussRule& rule = gauss_legendre(l_max + 1);
    angular.polar_cos = rule.nodes;
    angular.polar_weight = rule.weights;
    angular.n_azimuth = 2 * l_max + 1;
    return angular;
}

double AngularGrid::azimuth(int b) const { return kTwoPi * b / n_azimuth; }
double AngularGrid::azimuth_weight() const { return kTwoPi / n_azimuth; }

namespace {

/// Dense table Y(lm, angular point) for l <= l_max on the product grid.
Eigen::MatrixXd harmonic_table(const AngularGrid& angular, int l_max) {
    const int n_modes = (l_max + 1) * (l_max + 1);
    Eigen::MatrixXd table(n_modes, angular.total());
    std::vector<double> col(l_max + 1);
    for (int a = 0; a < angular.n_polar(); ++a) {
        const double u = angular.polar_cos[a];
        for (int b = 0; b < angular.n_azimuth; ++b) {
            const double az = angular.azimuth(b);
            const int point = a * angular.n_azimuth + b;
            for (int m = 0; m <= l_max; ++m) {
                normalized_alf_column(l_max, m, u, col);
                for (int l = m; l <= l_max; ++l) {
                    if (m == 0) {
                        table(l * l + l, point) = col[l];
                    } else {
                        double f = std::sqrt(2.0) * col[l];
                        table(l * l + l + m, point) = f * std::cos(m * az);
                        table(l * l + l - m, point) = f * std::sin(m * az);
                    }
                }
            }
        }
    }
    return table;
}

}  // namespace

SphericalField decompose(const AngularGrid& angular,
                         const Eigen::MatrixXd& samples, int l_max,
                         const RadialGrid& grid, const PhysicalParams& params) {
    if (angular.n_polar() < l_max + 1 || angular.n_azimuth < 2 * l_max + 1)
        throw GridError("decompose: angular grid cannot resolve band limit " +
                        std::to_string(l_max));
    if (samples.rows() != angular.total() || samples.cols() != grid.size())
        throw DimensionError("decompose: sample matrix has wrong shape");

    Eigen::MatrixXd table = harmonic_table(angular, l_max);
    Eigen::VectorXd weights(angular.total());
    for (int a = 0; a < angular.n_polar(); ++a)
        for (int b = 0; b < angular.n_azimuth; ++b)
            weights[a * angular.n_azimuth + b] =
                angular.polar_weight[a] * angular.azimuth_weight();

    SphericalField field = SphericalField::zero(params, l_max, grid);
    Eigen::MatrixXd coefs = table * weights.asDiagonal() * samples;
    for (std::size_t idx = 0; idx < field.modes.size(); ++idx)
        field.modes[idx].radial = coefs.row(idx).transpose();
    return field;
}

Eigen::MatrixXd reconstruct(const AngularGrid& angular,
                            const SphericalField& field) {
    Eigen::MatrixXd table = harmonic_table(angular, field.l_max);
    Eigen::MatrixXd coefs(field.modes.size(), field.n_radial());
    for (std::size_t idx = 0; idx < field.modes.size(); ++idx)
        coefs.row(idx) = field.modes[idx].radial.transpose();
    return table.transpose() * coefs;
}

SphericalField stationary_theta(const SphericalField& field) {
    SphericalField theta = field;
    const double scale = field.params.momentum_scale();
    const int n = field.n_radial();
    Eigen::VectorXd phi0_nodes(n);
    std::vector<double> w_k(n);
    for (int i = 0; i < n; ++i) {
        phi0_nodes[i] = phi0(wavenumber(field.params, field.r_nodes[i]));
        w_k[i] = field.r_weights[i] / scale;
    }
    for (auto& mode : theta.modes) {
        Eigen::VectorXd f = to_radial(field, field.modes[theta.mode_index(
                                                 mode.ell, mode.m_index)]);
        double c0 = 0.0;
        for (int i = 0; i < n; ++i) c0 += w_k[i] * f[i] * phi0_nodes[i];
        mode.radial = from_radial(field, c0 * phi0_nodes);
    }
    return theta;
}

Evolve3dResult evolve_3d(const SphericalField& field0,
                         const DiscreteOperator& op, const SolverConfig& cfg) {
    field0.require_compatible(op.grid);
    cfg.validate();

    // Shared recording schedule (must match evolve()).
    const long n_steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    std::vector<double> times = {0.0};
    for (long istep = 1; istep <= n_steps; ++istep)
        if (istep % cfg.record_every == 0 || istep == n_steps)
            times.push_back(istep * cfg.dt);

    Evolve3dResult result;
    result.final = field0;
    result.per_mode.resize(field0.modes.size());

    parallel_for(field0.modes.size(), [&](std::size_t idx) {
        const Mode& mode = field0.modes[idx];
        ModeDiagnostics& md = result.per_mode[idx];
        md.ell = mode.ell;
        md.m_index = mode.m_index;
        if (mode.radial.isZero(0.0)) {
            // The zero mode stays exactly zero under every scheme; skip the
            // stepping and synthesize its rows.
            md.diag.rows.reserve(times.size());
            for (double t : times) md.diag.rows.push_back({t, 0, 0, 0, 0, 0, 0});
            return;
        }
        EvolveResult run = evolve(to_radial(field0, mode), op, cfg);
        md.diag = std::move(run.diag);
        result.final.modes[idx].radial = from_radial(field0, run.final.f);
    });

    const double scale = field0.params.momentum_scale();
    const double dist_factor = std::pow(scale, 1.5);
    const double energy_factor = std::sqrt(kFourPi) * std::pow(scale, 4) / 4.0;
    const std::size_t zero_zero = 0;  // (0,0) is always the first mode
    result.aggregate.reserve(times.size());
    for (std::size_t rix = 0; rix < times.size(); ++rix) {
        Aggregate3dRow row{times[rix], 0.0, 0.0};
        double sq = 0.0;
        for (const auto& md : result.per_mode)
            sq += md.diag.rows[rix].dist_eq * md.diag.rows[rix].dist_eq;
        row.dist_to_theta = dist_factor * std::sqrt(sq);
        row.energy_3d =
            energy_factor * result.per_mode[zero_zero].diag.rows[rix].energy;
        result.aggregate.push_back(row);
    }
    return result;
}

double mass_functional(const SphericalField& field) {
    const Mode& mode = field.at(0, 0);
    double sum = 0.0;
    for (int i = 0; i < field.n_radial(); ++i) {
        double k = wavenumber(field.params, field.r_nodes[i]);
        sum += field.r_weights[i] * field.r_nodes[i] * field.r_nodes[i] *
               mode.radial[i] * occupancy_pair(k);
    }
    return std::sqrt(kFourPi) * sum;
}

double energy_3d(const SphericalField& field) {
    const Mode& mode = field.at(0, 0);
    double sum = 0.0;
    for (int i = 0; i < field.n_radial(); ++i) {
        double k = wavenumber(field.params, field.r_nodes[i]);
        sum += field.r_weights[i] * std::pow(field.r_nodes[i], 3) *
               mode.radial[i] * occupancy_pair(k);
    }
    return std::sqrt(kFourPi) * sum;
}

double background_mass(const PhysicalParams& params,
                       const QuadratureConfig& cfg) {
    params.validate();
    const double scale = params.momentum_scale();
    auto integrand = [](double k) {
        return k * k * (k > 0.0 ? 1.0 / std::expm1(2.0 * k) : 0.0);
    };
    std::vector<double> breaks = {0.0, 1.0, 10.0, cfg.tail_cutoff};
    double moment = integrate(integrand, breaks, cfg);
    return kFourPi * scale * scale * scale * moment;
}

double w0(double r, double r2, const PhysicalParams& params) {
    if (!std::isfinite(r) || !std::isfinite(r2) || r <= 0.0 || r2 <= 0.0)
        throw DomainError("w0: momenta must be finite and > 0");
    if (r == r2)
        throw NumericalError("w0: degenerate input r = r', Heaviside edge");
    const double pref = 9.0 / (32.0 * M_PI * M_PI * params.n_c);
    auto n0 = [&](double x) { return occupancy(wavenumber(params, x)); };
    auto n0p = [&](double x) { return 1.0 + occupancy(wavenumber(params, x)); };

    double gain = 0.0;
    if (r > r2) {
        gain = (r - r2) * (r - r2) * n0(r) * n0p(r2) * n0p(r - r2);
    } else {
        gain = (r2 - r) * (r2 - r) * n0(r2) * n0p(r) * n0p(r2 - r);
    }
    double loss = (r + r2) * (r + r2) * n0(r + r2) * n0p(r) * n0p(r2);
    return pref * (gain - loss);
}

BigM big_m(double r, const PhysicalParams& params, const QuadratureConfig& cfg) {
    if (!std::isfinite(r) || r <= 0.0)
        throw DomainError("big_m: momentum must be finite and > 0");
    const double scale = params.momentum_scale();
    const double r_max = scale * cfg.tail_cutoff;
    if (r >= r_max)
        throw DomainError("big_m: momentum beyond the truncation radius");

    auto integrand = [&](double rp) {
        if (rp <= 0.0) return 0.0;
        return w0(r, rp, params) * rp * rp * rp;
    };
    std::vector<double> breaks = {0.0};
    for (double b : {0.5 * r, r, r + 3.0 * scale, r + 10.0 * scale})
        if (b > 0.0 && b < r_max && b > breaks.back()) breaks.push_back(b);
    breaks.push_back(r_max);
    BigM out;
    out.from_w0 = integrate(integrand, breaks, cfg) / r;
    double k = wavenumber(params, r);
    out.closed = collision_frequency(k, cfg) * occupancy_pair(k);
    return out;
}

double calibrate_m_factor(const PhysicalParams& params,
                          const QuadratureConfig& cfg, double r_ref) {
    BigM ref = big_m(r_ref, params, cfg);
    if (ref.from_w0 == 0.0)
        throw NumericalError("calibrate_m_factor: vanishing reference value");
    return ref.closed / ref.from_w0;
}

}  // namespace phkin
