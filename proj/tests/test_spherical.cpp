#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "phkin/field_io.hpp"
#include "phkin/spherical.hpp"

using namespace phkin;

namespace {

const QuadratureConfig kCfg;
const PhysicalParams kParams;  // nondimensional: c = 1, 2 k_B T = 1

const RadialGrid& mid_grid() {
    static RadialGrid grid = [] {
        GridSpec spec;
        spec.n = 200;
        return build_grid(spec);
    }();
    return grid;
}

const DiscreteOperator& mid_op() {
    static DiscreteOperator op =
        assemble(mid_grid(), kCfg, GammaMode::KernelConsistent);
    return op;
}

SphericalField exp_field(int l_max, int ell, int m) {
    SphericalField field = SphericalField::zero(kParams, l_max, mid_grid());
    for (int i = 0; i < field.n_radial(); ++i)
        field.at(ell, m).radial[i] = std::exp(-field.r_nodes[i]);
    return field;
}

}  // namespace

TEST_SUITE_BEGIN("spherical");

TEST_CASE("physical parameters and the wavenumber map") {
    PhysicalParams params;
    params.g = 2.0;
    params.n_c = 3.0;
    params.m = 1.5;
    params.validate();
    CHECK(params.sound_speed() * params.sound_speed() ==
          doctest::Approx(params.g * params.n_c / params.m).epsilon(1e-15));

    CHECK(wavenumber(kParams, 0.0) == 0.0);
    CHECK(wavenumber(kParams, 0.37) == doctest::Approx(0.37).epsilon(1e-15));
    for (double r : {1e-3, 0.7, 12.0})
        CHECK(momentum(params, wavenumber(params, r)) ==
              doctest::Approx(r).epsilon(1e-14));
    CHECK_THROWS_AS(wavenumber(kParams, -1.0), DomainError);

    PhysicalParams bad;
    bad.temperature = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidSpecError);
}

TEST_CASE("occupancy identity across eleven decades") {
    for (double k = 1e-6; k <= 300.0; k *= 3.7) {
        double n0 = occupancy(k);
        CHECK(std::abs(n0 * (1.0 + n0) * 4.0 * std::sinh(k) * std::sinh(k) -
                       1.0) <= 1e-12);
        CHECK(occupancy_pair(k) ==
              doctest::Approx(n0 * (1.0 + n0)).epsilon(1e-12));
        CHECK(n0 > 0.0);
    }
    CHECK_THROWS_AS(occupancy(0.0), DomainError);
    CHECK_THROWS_AS(occupancy_pair(-1.0), DomainError);
}

TEST_CASE("legendre: values, orthogonality, endpoint") {
    CHECK(legendre(0, -0.3) == 1.0);
    CHECK(legendre(1, -0.3) == -0.3);
    for (int n = 0; n <= 64; ++n) CHECK(legendre(n, 1.0) == 1.0);
    CHECK_THROWS_AS(legendre(65, 0.5), DomainError);
    CHECK_THROWS_AS(legendre(3, 1.5), DomainError);

    const GaussRule& rule = gauss_legendre(64);
    for (int m = 0; m <= 8; ++m)
        for (int n = m; n <= 8; ++n) {
            double dot = 0.0;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j)
                dot += rule.weights[j] * legendre(m, rule.nodes[j]) *
                       legendre(n, rule.nodes[j]);
            double expected = (m == n) ? 2.0 / (2.0 * n + 1.0) : 0.0;
            CHECK(std::abs(dot - expected) <= 1e-12);
        }
}

TEST_CASE("real harmonics: orthonormality and the addition theorem") {
    AngularGrid angular = AngularGrid::for_band_limit(8);
    auto inner = [&](int l1, int m1, int l2, int m2) {
        double sum = 0.0;
        for (int a = 0; a < angular.n_polar(); ++a)
            for (int b = 0; b < angular.n_azimuth; ++b)
                sum += angular.polar_weight[a] * angular.azimuth_weight() *
                       real_spherical_harmonic(l1, m1, angular.polar_cos[a],
                                               angular.azimuth(b)) *
                       real_spherical_harmonic(l2, m2, angular.polar_cos[a],
                                               angular.azimuth(b));
        return sum;
    };
    CHECK(inner(0, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inner(3, 2, 3, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inner(5, -4, 5, -4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner(3, 2, 3, -2)) <= 1e-12);
    CHECK(std::abs(inner(2, 1, 4, 1)) <= 1e-12);
    CHECK(std::abs(inner(0, 0, 1, 0)) <= 1e-12);

    // P_l(u.u') = 4 pi/(2l+1) sum_m Y_lm(u) Y_lm(u').
    const double u1 = 0.31, az1 = 1.1, u2 = -0.52, az2 = 2.7;
    double s1 = std::sqrt(1.0 - u1 * u1), s2 = std::sqrt(1.0 - u2 * u2);
    double cos_angle = u1 * u2 + s1 * s2 * std::cos(az1 - az2);
    for (int l : {1, 3, 6}) {
        double sum = 0.0;
        for (int m = -l; m <= l; ++m)
            sum += real_spherical_harmonic(l, m, u1, az1) *
                   real_spherical_harmonic(l, m, u2, az2);
        sum *= 4.0 * M_PI / (2.0 * l + 1.0);
        CHECK(sum == doctest::Approx(legendre(l, cos_angle)).epsilon(1e-12));
    }
}

TEST_CASE("radial transform: phi image, inverse, mismatch") {
    SphericalField field = SphericalField::zero(kParams, 0, mid_grid());
    // Omega(r) = r maps onto phi(k) when c = 2 k_B T.
    for (int i = 0; i < field.n_radial(); ++i)
        field.at(0, 0).radial[i] = field.r_nodes[i];
    Eigen::VectorXd f = to_radial(field, field.at(0, 0));
    for (int i = 0; i < field.n_radial(); ++i)
        CHECK(f[i] == doctest::Approx(phi(mid_grid().nodes[i])).epsilon(1e-14));

    Eigen::VectorXd omega = from_radial(field, f);
    for (int i = 0; i < field.n_radial(); ++i)
        CHECK(omega[i] ==
              doctest::Approx(field.r_nodes[i]).epsilon(1e-13));

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(field.n_radial());
    CHECK(from_radial(field, zero).norm() == 0.0);
    CHECK_THROWS_AS(from_radial(field, Eigen::VectorXd::Zero(3)), GridError);

    SphericalField other = field;
    other.params.temperature *= 2.0;
    CHECK_THROWS_AS(other.require_compatible(mid_grid()), GridError);
}

TEST_CASE("decompose: selectivity, round trip, Parseval") {
    const int l_max = 4;
    AngularGrid angular = AngularGrid::for_band_limit(l_max);
    const RadialGrid& grid = mid_grid();

    // Constant-in-angle data lands entirely in (0,0).
    Eigen::MatrixXd samples(angular.total(), grid.size());
    for (int p = 0; p < angular.total(); ++p)
        for (int i = 0; i < grid.size(); ++i)
            samples(p, i) = std::exp(-grid.nodes[i]);
    SphericalField field = decompose(angular, samples, l_max, grid, kParams);
    double off = 0.0;
    for (const Mode& mode : field.modes)
        if (mode.ell != 0) off = std::max(off, mode.radial.cwiseAbs().maxCoeff());
    CHECK(off <= 1e-13);
    CHECK(field.at(0, 0).radial[5] ==
          doctest::Approx(std::sqrt(4.0 * M_PI) * std::exp(-grid.nodes[5]))
              .epsilon(1e-12));

    // A pure Y_10 * r field lands in exactly one mode.
    for (int a = 0; a < angular.n_polar(); ++a)
        for (int b = 0; b < angular.n_azimuth; ++b)
            for (int i = 0; i < grid.size(); ++i)
                samples(a * angular.n_azimuth + b, i) =
                    real_spherical_harmonic(1, 0, angular.polar_cos[a],
                                            angular.azimuth(b)) *
                    grid.nodes[i];
    field = decompose(angular, samples, l_max, grid, kParams);
    for (const Mode& mode : field.modes) {
        if (mode.ell == 1 && mode.m_index == 0) {
            CHECK(mode.radial[17] ==
                  doctest::Approx(grid.nodes[17]).epsilon(1e-12));
        } else {
            CHECK(mode.radial.cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    // Band-limited round trip and Parseval.
    std::uint64_t rng = 314159;
    SphericalField random_field = SphericalField::zero(kParams, l_max, grid);
    for (Mode& mode : random_field.modes) {
        double amp = oracle::uniform_pm1(rng);
        for (int i = 0; i < grid.size(); ++i)
            mode.radial[i] = amp * std::exp(-0.5 * random_field.r_nodes[i]);
    }
    Eigen::MatrixXd recon = reconstruct(angular, random_field);
    SphericalField back = decompose(angular, recon, l_max, grid, kParams);
    for (std::size_t idx = 0; idx < back.modes.size(); ++idx)
        CHECK((back.modes[idx].radial - random_field.modes[idx].radial)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);

    double sample_norm = 0.0;
    for (int a = 0; a < angular.n_polar(); ++a)
        for (int b = 0; b < angular.n_azimuth; ++b)
            for (int i = 0; i < grid.size(); ++i) {
                double v = recon(a * angular.n_azimuth + b, i);
                sample_norm += angular.polar_weight[a] *
                               angular.azimuth_weight() *
                               random_field.r_weights[i] * v * v;
            }
    double mode_norm = 0.0;
    for (const Mode& mode : random_field.modes)
        for (int i = 0; i < grid.size(); ++i)
            mode_norm += random_field.r_weights[i] * mode.radial[i] *
                         mode.radial[i];
    CHECK(sample_norm == doctest::Approx(mode_norm).epsilon(1e-12));

    CHECK_THROWS_AS(decompose(angular, samples, 6, grid, kParams), GridError);
    CHECK_THROWS_AS(
        decompose(angular, Eigen::MatrixXd::Zero(3, grid.size()), l_max, grid,
                  kParams),
        DimensionError);
}

TEST_CASE("stationary state: fixed point and zero modes") {
    SphericalField field = SphericalField::zero(kParams, 1, mid_grid());
    for (int i = 0; i < field.n_radial(); ++i)
        field.at(1, 0).radial[i] = 0.7 * field.r_nodes[i];
    SphericalField theta = stationary_theta(field);
    for (int i = 0; i < field.n_radial(); ++i)
        CHECK(theta.at(1, 0).radial[i] ==
              doctest::Approx(field.at(1, 0).radial[i]).epsilon(1e-9));
    CHECK(theta.at(0, 0).radial.cwiseAbs().maxCoeff() == 0.0);
    CHECK(theta.at(1, 1).radial.cwiseAbs().maxCoeff() == 0.0);

    // Mode with no c0 component maps to a vanishing coefficient.
    SphericalField odd = SphericalField::zero(kParams, 0, mid_grid());
    Eigen::VectorXd f = preset_exp_decay(mid_grid());
    f -= project_P(mid_grid(), f).pf;
    odd.at(0, 0).radial = from_radial(odd, f);
    SphericalField odd_theta = stationary_theta(odd);
    CHECK(odd_theta.at(0, 0).radial.cwiseAbs().maxCoeff() <=
          1e-10 * odd.at(0, 0).radial.cwiseAbs().maxCoeff());
}

TEST_CASE("solver limit reproduces the stationary state") {
    SphericalField field = exp_field(0, 0, 0);
    SolverConfig cfg;
    Evolve3dResult run = evolve_3d(field, mid_op(), cfg);
    REQUIRE_FALSE(run.aggregate.empty());
    CHECK(run.aggregate.back().dist_to_theta <=
          0.05 * run.aggregate.front().dist_to_theta);
    for (std::size_t j = 1; j < run.aggregate.size(); ++j)
        CHECK(run.aggregate[j].dist_to_theta <=
              run.aggregate[j - 1].dist_to_theta + 1e-10);
}

TEST_CASE("evolve_3d: stationary data, conservation, mode universality") {
    SphericalField field = exp_field(5, 0, 0);
    field.at(5, 3).radial = field.at(0, 0).radial;

    SolverConfig cfg;
    cfg.t_end = 20.0;
    Evolve3dResult run = evolve_3d(field, mid_op(), cfg);

    // Identical radial data in different (l,m) slots evolves identically.
    const Diagnostics* d00 = nullptr;
    const Diagnostics* d53 = nullptr;
    for (const auto& md : run.per_mode) {
        if (md.ell == 0 && md.m_index == 0) d00 = &md.diag;
        if (md.ell == 5 && md.m_index == 3) d53 = &md.diag;
    }
    REQUIRE(d00 != nullptr);
    REQUIRE(d53 != nullptr);
    REQUIRE(d00->rows.size() == d53->rows.size());
    for (std::size_t j = 0; j < d00->rows.size(); ++j) {
        CHECK(d00->rows[j].l2_norm == d53->rows[j].l2_norm);
        CHECK(d00->rows[j].dist_eq == d53->rows[j].dist_eq);
    }
    CHECK((run.final.at(0, 0).radial - run.final.at(5, 3).radial).norm() ==
          0.0);

    // 3-D energy conservation along the run.
    double e0 = run.aggregate.front().energy_3d;
    for (const auto& row : run.aggregate)
        CHECK(std::abs(row.energy_3d - e0) <= 1e-10 * std::abs(e0));

    // Stationary initial data keeps every diagnostic flat.
    SphericalField theta = stationary_theta(field);
    Evolve3dResult frozen = evolve_3d(theta, mid_op(), cfg);
    for (const auto& row : frozen.aggregate)
        CHECK(row.dist_to_theta <=
              1e-10 * (1.0 + frozen.aggregate.front().energy_3d));
}

TEST_CASE("mass functional: orthogonality, linearity, sign") {
    SphericalField field = exp_field(1, 1, 1);
    CHECK(mass_functional(field) == 0.0);  // no (0,0) component

    SphericalField g0 = SphericalField::zero(kParams, 0, mid_grid());
    Eigen::VectorXd dev = preset_exp_decay(mid_grid());
    dev -= project_P(mid_grid(), dev).pf;  // zero-c0 deviation
    g0.at(0, 0).radial = from_radial(g0, dev);

    SphericalField theta_form = SphericalField::zero(kParams, 0, mid_grid());
    for (int i = 0; i < theta_form.n_radial(); ++i)
        theta_form.at(0, 0).radial[i] = 0.4 * theta_form.r_nodes[i];

    SphericalField mixed = theta_form;
    mixed.at(0, 0).radial += g0.at(0, 0).radial;
    double m_start = mass_functional(mixed);
    double m_limit = mass_functional(stationary_theta(mixed));
    CHECK(m_start - m_limit ==
          doctest::Approx(mass_functional(g0)).epsilon(1e-9));

    SphericalField flipped = theta_form;
    flipped.at(0, 0).radial -= g0.at(0, 0).radial;
    double m2 = mass_functional(flipped) -
                mass_functional(stationary_theta(flipped));
    CHECK(m2 == doctest::Approx(-mass_functional(g0)).epsilon(1e-9));

    CHECK(background_mass(kParams, kCfg) ==
          doctest::Approx(4.0 * M_PI * 0.3005142264776457).epsilon(1e-9));
}

TEST_CASE("reduced collision weight w0 and the M(r) routes") {
    std::uint64_t rng = 2026;
    for (int trial = 0; trial < 20; ++trial) {
        double a = 0.2 + 3.0 * (oracle::uniform_pm1(rng) + 1.0);
        double b = 0.2 + 3.0 * (oracle::uniform_pm1(rng) + 1.0);
        if (a == b) continue;
        CHECK(w0(a, b, kParams) == w0(b, a, kParams));  // bit-exact
    }
    CHECK_THROWS_AS(w0(1.0, 1.0, kParams), NumericalError);
    CHECK_THROWS_AS(w0(-1.0, 2.0, kParams), DomainError);

    double lambda = calibrate_m_factor(kParams, kCfg, 1.0);
    // Analytic value of the conversion factor: 128 pi^2 / 9.
    CHECK(lambda ==
          doctest::Approx(128.0 * M_PI * M_PI / 9.0).epsilon(1e-6));
    for (double k : {0.1, 0.9, 6.0}) {
        BigM m = big_m(momentum(kParams, k), kParams, kCfg);
        CHECK(std::abs(lambda * m.from_w0 - m.closed) / m.closed < 1e-3);
    }
    CHECK_THROWS_AS(big_m(1e9, kParams, kCfg), DomainError);
}

TEST_CASE("change-of-variables conjugacy of the two operator routes") {
    const DiscreteOperator& op = mid_op();
    SphericalField field = exp_field(0, 0, 0);
    double lambda = calibrate_m_factor(kParams, kCfg, 1.0);
    Eigen::VectorXd f = to_radial(field, field.at(0, 0));
    Eigen::VectorXd lhs = from_radial(field, op.apply(f));

    const double r_max = kParams.momentum_scale() * kCfg.tail_cutoff;
    auto gain_at = [&](double r, auto&& profile) {
        auto integrand = [&](double rp) {
            return w0(r, rp, kParams) * profile(rp) * rp * rp;
        };
        std::vector<double> breaks = {0.0, 0.5 * r, r, r + 3.0, r + 10.0};
        while (breaks.back() >= r_max) breaks.pop_back();
        breaks.push_back(r_max);
        return integrate(integrand, breaks, kCfg);
    };

    for (int i = 0; i < op.size(); i += 25) {
        double k = op.grid.nodes[i];
        if (k < 0.5 || k > 5.0) continue;
        double r = field.r_nodes[i];
        double closed = collision_frequency(k, kCfg) * occupancy_pair(k);
        double rhs =
            (-closed * std::exp(-r) +
             lambda * gain_at(r, [](double rp) { return std::exp(-rp); })) /
            occupancy_pair(k);
        CHECK(std::abs(lhs[i] - rhs) <= 1e-3 * std::abs(lhs[i]));
    }

    // On the linear profile the 3-D route must vanish identically.
    for (double r : {0.3, 1.0, 2.0, 4.0}) {
        double k = wavenumber(kParams, r);
        double closed = collision_frequency(k, kCfg) * occupancy_pair(k);
        double res =
            -closed * r + lambda * gain_at(r, [](double rp) { return rp; });
        CHECK(std::abs(res) <= 1e-10 * closed * r);
    }
}

TEST_CASE("field JSON round trip") {
    SphericalField field = exp_field(2, 1, -1);
    field.at(2, 2).radial = 0.3 * field.at(1, -1).radial;
    std::string text = field_to_json(field);
    SphericalField back = field_from_json(text);
    CHECK(back.l_max == field.l_max);
    CHECK(back.params.temperature == field.params.temperature);
    REQUIRE(back.modes.size() == field.modes.size());
    for (std::size_t idx = 0; idx < field.modes.size(); ++idx) {
        CHECK(back.modes[idx].ell == field.modes[idx].ell);
        CHECK((back.modes[idx].radial - field.modes[idx].radial).norm() == 0.0);
    }
    CHECK_THROWS_AS(field_from_json("{not json"), InvalidSpecError);
}

TEST_SUITE_END();
