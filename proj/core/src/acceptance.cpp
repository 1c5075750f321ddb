#include "phkin/acceptance.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "phkin/collision_operator.hpp"
#include "phkin/csv.hpp"
#include "phkin/evolution.hpp"
#include "phkin/kernels.hpp"
#include "phkin/spherical.hpp"

namespace phkin {

namespace {

constexpr double kPi4Over15 = 6.4939394022668291;
constexpr double kPi4Over30 = 3.2469697011334146;
constexpr double kPi6Over42 = 22.890218894650106;
constexpr double kPi4Over60 = 1.6234848505667073;
constexpr double kBound4 = 25.975757609067317;    // (4/15) pi^4
constexpr double kBound2 = 183.12175115720085;    // (4/21) pi^6
constexpr double kSmallKBound = 13.532248562496953;  // 2 pi^3 / sqrt(21)

double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

std::string fmt(double v) { return format_double(v); }

/// max_i |(E_h phi)_i| / max_i |gamma_i phi_i|.
double nullspace_residual(const DiscreteOperator& op) {
    Eigen::VectorXd r = op.apply(op.phi_nodes);
    return r.cwiseAbs().maxCoeff() /
           op.gamma_vec.cwiseProduct(op.phi_nodes).cwiseAbs().maxCoeff();
}

struct Shared {
    QuadratureConfig cfg;
    RadialGrid grid;             // default N=400 grid
    DiscreteOperator op;         // KernelConsistent on the default grid
    double c_star = 0.0;         // from criterion 8, used by 10
    Diagnostics conserved_diag;  // from criterion 9, used by 10 and 11
};

CriterionResult c1_gamma_small_k(Shared& sh) {
    double v = collision_frequency(1e-3, sh.cfg) / 1e-3;
    double rel = std::abs(v - kPi4Over15) / kPi4Over15;
    return {1, "Gamma small-k constant pi^4/15", rel <= 0.01,
            "Gamma(1e-3)/1e-3 = " + fmt(v) + ", rel dev " + fmt(rel)};
}

CriterionResult c2_gamma_large_k(Shared& sh) {
    double v = collision_frequency(50.0, sh.cfg) / std::pow(50.0, 5);
    double rel = std::abs(v - 1.0 / 15.0) * 15.0;
    return {2, "Gamma large-k constant 1/15", rel <= 0.02,
            "Gamma(50)/50^5 = " + fmt(v) + ", rel dev " + fmt(rel)};
}

CriterionResult c3_moments(Shared& sh) {
    std::vector<double> breaks = {0.0, 5.0, 20.0, 80.0};
    auto m4 = [](double k) {
        double p = phi(k);
        return p * p;
    };
    auto m6 = [](double k) {
        double p = phi(k);
        return k * k * p * p;
    };
    double v4 = integrate(m4, breaks, sh.cfg);
    double v6 = integrate(m6, breaks, sh.cfg);
    double e4 = std::abs(v4 - kPi4Over30);
    double e6 = std::abs(v6 - kPi6Over42);
    return {3, "moment identities pi^4/30 and pi^6/42",
            e4 <= 1e-8 && e6 <= 1e-8,
            "errors " + fmt(e4) + ", " + fmt(e6)};
}

CriterionResult c4_kernel_bounds(Shared& sh) {
    bool pass = true;
    std::ostringstream detail;
    for (double k : {0.1, 1.0, 10.0}) {
        double v = row_norm_sq(k, sh.cfg);
        double bound = kBound4 * std::pow(k, 4) + kBound2 * k * k;
        pass = pass && (v < bound);
        detail << "rns(" << fmt(k) << ")=" << fmt(v) << "<" << fmt(bound) << "; ";
    }
    for (double k : {0.1, 0.01, 0.001}) {
        double v = std::sqrt(row_norm_sq(k, sh.cfg));
        pass = pass && (v <= kSmallKBound * k);
        detail << "|K(" << fmt(k) << ",.)|=" << fmt(v) << "; ";
    }
    return {4, "kernel row-norm bounds", pass, detail.str()};
}

CriterionResult c5_hs_stability(Shared& sh) {
    QuadratureConfig cfg60 = sh.cfg;
    QuadratureConfig cfg120(sh.cfg.abs_tol, sh.cfg.rel_tol, 120.0,
                            sh.cfg.max_panels);
    double c60 = hs_norm_c0(cfg60).value;
    double c120 = hs_norm_c0(cfg120).value;
    double rel = std::abs(c120 - c60) / c60;
    return {5, "Hilbert-Schmidt norm stable under tail doubling", rel < 0.01,
            "C0(60) = " + fmt(c60) + ", C0(120) = " + fmt(c120) +
                ", rel change " + fmt(rel)};
}

CriterionResult c6_nullspace(Shared& sh) {
    double kc_res = nullspace_residual(sh.op);
    bool pass = kc_res <= 1e-13;
    std::ostringstream detail;
    detail << "KernelConsistent residual " << fmt(kc_res) << "; quadrature: ";

    // Uniform panels at fixed nodes-per-panel halve every width per rung,
    // isolating the second-order convergence of the grid quadrature.
    std::vector<double> residuals;
    std::vector<int> sizes = {256, 512, 1024};
    for (int n : sizes) {
        GridSpec spec;
        spec.n = n;
        spec.n_panels = n / 8;
        spec.panel_growth = 1.0;
        spec.grid_tol = 1e-1;
        RadialGrid grid = build_grid(spec);
        DiscreteOperator op = assemble(grid, sh.cfg, GammaMode::Quadrature);
        Eigen::VectorXd r = op.apply(op.phi_nodes);
        Eigen::VectorXd gp = op.gamma_vec.cwiseProduct(op.phi_nodes);
        residuals.push_back(op.sqrt_w.cwiseProduct(r).norm() /
                            op.sqrt_w.cwiseProduct(gp).norm());
        detail << fmt(residuals.back()) << " ";
    }
    // Least-squares order in N.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        double x = std::log(sizes[i]), y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = sizes.size();
    double order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    detail << "(order " << fmt(order) << ")";
    pass = pass && residuals.back() <= 1e-4 && order >= 2.0;
    return {6, "discrete nullspace of E", pass, detail.str()};
}

CriterionResult c7_form_positivity(Shared& sh) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    const int n = sh.op.size();
    bool pass = true;
    double worst_pos = 0.0, worst_cs = 0.0;
    Eigen::VectorXd prev;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f[i] = uniform_pm1(rng);
        double norm_sq = sh.op.w.cwiseProduct(f).dot(f);
        double quad = dirichlet_form(sh.op, f, f);
        worst_pos = std::min(worst_pos, quad / norm_sq);
        if (quad < -1e-10 * norm_sq) pass = false;
        if (trial % 2 == 1) {
            double cross = dirichlet_form(sh.op, prev, f);
            double slack = 0.5 * dirichlet_form(sh.op, prev, prev) +
                           0.5 * quad + 1e-10 - std::abs(cross);
            worst_cs = std::min(worst_cs, slack);
            if (slack < 0.0) pass = false;
        }
        prev = f;
    }
    return {7, "form positivity and Cauchy-Schwarz over 10^3 random vectors",
            pass,
            "min <-Ef,f>/|f|^2 = " + fmt(worst_pos) + ", min CS slack = " +
                fmt(worst_cs)};
}

CriterionResult c8_spectral_gap(Shared& sh) {
    GridSpec spec200;
    spec200.n = 200;
    RadialGrid grid200 = build_grid(spec200);
    DiscreteOperator op200 =
        assemble(grid200, sh.cfg, GammaMode::KernelConsistent);
    SpectralGap gap200 = spectral_gap(symmetrize(op200, true));
    SpectralGap gap400 = spectral_gap(symmetrize(sh.op, true));
    sh.c_star = gap400.c_star;

    SpectralGap bare = spectral_gap(symmetrize(sh.op, false));
    Eigen::VectorXd ref =
        sh.op.gamma_vec.cwiseSqrt().cwiseProduct(sh.op.phi_nodes);
    ref /= ref.norm();
    double cosine = std::abs(ref.dot(bare.groundvec));

    double spread = std::abs(gap200.c_star - gap400.c_star) / gap400.c_star;
    bool pass = gap200.c_star > 0.0 && gap400.c_star > 0.0 && spread < 0.05 &&
                bare.c_star >= -1e-8 && bare.c_star <= 1e-6 && cosine >= 0.999;
    return {8, "spectral gap C* and uncorrected kernel mode", pass,
            "C*(200) = " + fmt(gap200.c_star) + ", C*(400) = " +
                fmt(gap400.c_star) + ", spread " + fmt(spread) +
                ", bare min eig " + fmt(bare.c_star) + ", cosine " +
                fmt(cosine)};
}

CriterionResult c9_conservation(Shared& sh) {
    SolverConfig cfg;  // CN, dt 1e-2, t_end 200, record_every 10
    EvolveResult run = evolve(preset_exp_decay(sh.grid), sh.op, cfg);
    sh.conserved_diag = run.diag;
    double e0 = run.diag.rows.front().energy;
    double c0 = run.diag.rows.front().c0;
    double drift_e = 0.0, drift_c = 0.0;
    for (const auto& row : run.diag.rows) {
        drift_e = std::max(drift_e, std::abs(row.energy - e0) / std::abs(e0));
        drift_c = std::max(drift_c, std::abs(row.c0 - c0) / std::abs(c0));
    }
    bool pass = drift_e <= 1e-10 && drift_c <= 1e-10;
    return {9, "energy and c0 conservation over t in [0,200]", pass,
            "max energy drift " + fmt(drift_e) + ", max c0 drift " +
                fmt(drift_c)};
}

CriterionResult c10_apriori(Shared& sh) {
    if (sh.conserved_diag.rows.empty() || sh.c_star <= 0.0)
        return {10, "a-priori inequality", false,
                "missing prerequisites from criteria 8/9"};
    const auto& rows = sh.conserved_diag.rows;
    double rhs = 2.0 * rows.front().l2_norm * rows.front().l2_norm;
    double integral = 0.0, worst = 1e300;
    bool pass = true;
    for (std::size_t j = 1; j < rows.size(); ++j) {
        double dt = rows[j].t - rows[j - 1].t;
        integral += 0.5 * dt *
                    (rows[j].gamma_norm * rows[j].gamma_norm +
                     rows[j - 1].gamma_norm * rows[j - 1].gamma_norm);
        double lhs =
            rows[j].l2_norm * rows[j].l2_norm + 2.0 * sh.c_star * integral;
        worst = std::min(worst, rhs - lhs);
        if (lhs > rhs) pass = false;
    }
    return {10, "a-priori dissipation inequality along the trajectory", pass,
            "min slack " + fmt(worst) + " with C* = " + fmt(sh.c_star)};
}

CriterionResult c11_decay_rate(Shared& sh) {
    // Decay-study grid: k_min small enough that the truncation rate
    // Gamma(k_min) t stays << 1 over the fit window.
    GridSpec spec;
    spec.k_min = 1e-5;
    spec.k_max = 20.0;
    RadialGrid grid = build_grid(spec);
    DiscreteOperator op = assemble(grid, sh.cfg, GammaMode::KernelConsistent);
    Eigen::VectorXd f0 = preset_exp_decay(grid);
    f0 -= project_P(grid, f0).pf;
    SolverConfig cfg;
    EvolveResult run = evolve(f0, op, cfg);
    DecayFit fit = decay_fit(run.diag, 10.0, 200.0);

    double min_f = 0.0;
    for (const auto& row : sh.conserved_diag.rows)
        min_f = std::min(min_f, row.min_f);

    bool pass = !fit.degenerate && fit.slope >= -0.65 && fit.slope <= -0.45 &&
                min_f >= -1e-10;
    return {11, "algebraic decay rate and positivity", pass,
            "slope " + fmt(fit.slope) + " (r2 " + fmt(fit.r2) +
                "), min_f along non-negative run " + fmt(min_f)};
}

CriterionResult c12_no_uniform_decay(Shared& sh) {
    SolverConfig cfg;
    cfg.t_end = 50.0;
    std::vector<double> eps_list = {0.4, 0.2, 0.1, 0.05};
    auto table = experiment_no_uniform_decay(sh.op, cfg, eps_list);
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (i > 0 && !(table[i].t_half > table[i - 1].t_half)) pass = false;
        detail << "t_half(" << fmt(table[i].eps) << ") = " << fmt(table[i].t_half)
               << "; ";
    }
    return {12, "t_half strictly increasing as eps decreases", pass,
            detail.str()};
}

CriterionResult c13_three_dimensional(Shared& sh) {
    PhysicalParams params;  // nondimensional defaults
    const int l_max = 8;
    SphericalField field0 = SphericalField::zero(params, l_max, sh.grid);
    auto set_mode = [&](int l, int m, auto&& profile) {
        Eigen::VectorXd v(field0.n_radial());
        for (int i = 0; i < v.size(); ++i) v[i] = profile(field0.r_nodes[i]);
        field0.at(l, m).radial = v;
    };
    set_mode(0, 0, [](double r) { return std::exp(-r); });
    set_mode(1, 0, [](double r) { return r * std::exp(-r); });
    set_mode(2, 1, [](double r) { return std::exp(-2.0 * r); });
    set_mode(5, 3, [](double r) { return (1.0 + r) * std::exp(-r); });

    std::ostringstream detail;
    bool pass = true;

    // Theta stationarity through the operator route.
    SphericalField theta = stationary_theta(field0);
    double res = 0.0;
    for (const auto& mode : theta.modes) {
        Eigen::VectorXd f = to_radial(theta, mode);
        double denom = sh.op.gamma_vec.cwiseProduct(f).cwiseAbs().maxCoeff();
        if (denom == 0.0) continue;
        res = std::max(res, sh.op.apply(f).cwiseAbs().maxCoeff() / denom);
    }
    pass = pass && res <= 1e-10;
    detail << "Theta residual " << fmt(res) << "; ";

    // Evolution: 3-D energy conservation and aggregate decay slope.
    SolverConfig cfg;
    Evolve3dResult run = evolve_3d(field0, sh.op, cfg);
    double e0 = run.aggregate.front().energy_3d;
    double drift = 0.0;
    for (const auto& row : run.aggregate)
        drift = std::max(drift, std::abs(row.energy_3d - e0) / std::abs(e0));
    pass = pass && drift <= 1e-10;
    detail << "3-D energy drift " << fmt(drift) << "; ";

    Diagnostics agg;
    for (const auto& row : run.aggregate)
        agg.rows.push_back({row.t, row.dist_to_theta, 0, 0, row.dist_to_theta,
                            0, 0});
    agg.rows.front().l2_norm = run.aggregate.front().dist_to_theta;
    DecayFit fit = decay_fit(agg, 10.0, 200.0);
    pass = pass && !fit.degenerate && fit.slope <= -0.45;
    detail << "aggregate slope " << fmt(fit.slope) << "; ";

    // Band-limited decompose/reconstruct round trip.
    std::mt19937_64 rng(0x2545f4914f6cdd1dull);
    SphericalField random_field = SphericalField::zero(params, l_max, sh.grid);
    for (auto& mode : random_field.modes) {
        double amp = uniform_pm1(rng);
        for (int i = 0; i < mode.radial.size(); ++i)
            mode.radial[i] = amp * std::exp(-random_field.r_nodes[i]);
    }
    AngularGrid angular = AngularGrid::for_band_limit(l_max);
    SphericalField back = decompose(angular, reconstruct(angular, random_field),
                                    l_max, sh.grid, params);
    double err = 0.0, scale = 0.0;
    for (std::size_t idx = 0; idx < back.modes.size(); ++idx) {
        err = std::max(err, (back.modes[idx].radial -
                             random_field.modes[idx].radial)
                                .cwiseAbs()
                                .maxCoeff());
        scale = std::max(scale,
                         random_field.modes[idx].radial.cwiseAbs().maxCoeff());
    }
    pass = pass && err <= 1e-12 * std::max(1.0, scale);
    detail << "round-trip error " << fmt(err);
    return {13, "3-D suite: Theta, conservation, decay, round trip", pass,
            detail.str()};
}

CriterionResult c14_appendix_consistency(Shared& sh) {
    PhysicalParams params;
    double lambda = calibrate_m_factor(params, sh.cfg, 1.0);
    bool pass = true;
    double worst = 0.0;
    for (double k = 0.05; k <= 20.0; k *= 1.6) {
        BigM m = big_m(momentum(params, k), params, sh.cfg);
        double rel = std::abs(lambda * m.from_w0 - m.closed) / m.closed;
        worst = std::max(worst, rel);
        if (rel >= 1e-3) pass = false;
    }
    double low = collision_frequency(1e-3, sh.cfg) / (4.0 * 1e-3);
    double high = collision_frequency(50.0, sh.cfg) / (4.0 * std::pow(50.0, 5));
    double rel_low = std::abs(low - kPi4Over60) / kPi4Over60;
    double rel_high = std::abs(high - 1.0 / 60.0) * 60.0;
    pass = pass && rel_low <= 0.01 && rel_high <= 0.02;
    return {14, "reduced-kernel consistency and M(r) limits", pass,
            "lambda = " + fmt(lambda) + ", worst rel dev " + fmt(worst) +
                ", limit devs " + fmt(rel_low) + ", " + fmt(rel_high)};
}

CriterionResult c15_hopital(Shared& sh) {
    bool pass = true;
    double worst = 1e300;
    for (double t : {0.1, 1.0, 10.0, 100.0})
        for (double theta : {0.0, 0.5, 1.0, 2.0})
            for (double rho : {0.01, 0.1, 1.0}) {
                HopitalArgs args{t, theta, rho};
                ScaledExp z = hopital_z(args, sh.cfg);
                ScaledExp bound = hopital_bound(args);
                worst = std::min(worst, bound.mantissa - z.mantissa);
                if (!ScaledExp::leq(z, bound)) pass = false;
            }
    return {15, "Hopital bound on the full (t, theta, rho) grid", pass,
            "min scaled slack " + fmt(worst)};
}

}  // namespace

AcceptanceReport run_acceptance(std::ostream* progress) {
    Shared sh;
    sh.grid = build_grid(GridSpec{});
    sh.op = assemble(sh.grid, sh.cfg, GammaMode::KernelConsistent);

    AcceptanceReport report;
    auto run = [&](auto&& fn) {
        CriterionResult r = fn(sh);
        if (progress)
            (*progress) << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] "
                        << r.name << " -- " << r.detail << "\n"
                        << std::flush;
        report.results.push_back(std::move(r));
    };
    run(c1_gamma_small_k);
    run(c2_gamma_large_k);
    run(c3_moments);
    run(c4_kernel_bounds);
    run(c5_hs_stability);
    run(c6_nullspace);
    run(c7_form_positivity);
    run(c8_spectral_gap);
    run(c9_conservation);
    run(c10_apriori);
    run(c11_decay_rate);
    run(c12_no_uniform_decay);
    run(c13_three_dimensional);
    run(c14_appendix_consistency);
    run(c15_hopital);
    return report;
}

}  // namespace phkin
