#include "phkin/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace phkin {

namespace {

double phi1_of(double z) {
    // (e^z - 1)/z, stable near 0.
    if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

double phi2_of(double z) {
    // (e^z - 1 - z)/z^2 = sum_{n>=0} z^n/(n+2)!
    if (std::abs(z) < 0.05) {
        double s = 0.0, term = 0.5;
        for (int n = 0; n < 12; ++n) {
            s += term;
            term *= z / (n + 3);
        }
        return s;
    }
    return (std::expm1(z) - z) / (z * z);
}

}  // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidSpecError("SolverConfig: dt must be > 0");
    if (!(t_end > dt))
        throw InvalidSpecError("SolverConfig: t_end must exceed dt");
    if (record_every < 1)
        throw InvalidSpecError("SolverConfig: record_every must be >= 1");
}

Stepper::Stepper(const DiscreteOperator& op, const SolverConfig& cfg)
    : scheme_(cfg.scheme), dt_(cfg.dt), fix_(cfg.fix_enabled()) {
    cfg.validate();
    sqrt_w_ = op.sqrt_w;
    inv_sqrt_w_ = op.sqrt_w.cwiseInverse();
    gamma_ = op.gamma_vec;
    sqrt_gamma_ = gamma_.cwiseMax(0.0).cwiseSqrt();
    phi0_hat_ = op.sqrt_w.cwiseProduct(op.phi0_nodes);
    energy_hat_ = op.sqrt_w.cwiseProduct(op.phi_nodes);
    sym_ = op.symmetric_dense();

    if (scheme_ == Scheme::CrankNicolson) {
        Eigen::MatrixXd a =
            Eigen::MatrixXd::Identity(op.size(), op.size()) - 0.5 * dt_ * sym_;
        cn_factor_.compute(a);
        if (cn_factor_.info() != Eigen::Success)
            throw NumericalError("Stepper: Crank-Nicolson factorization failed");
    } else {
        for (int i = 0; i < op.size(); ++i)
            if (!(gamma_[i] > 0.0))
                throw NumericalError(
                    "Stepper: ETD schemes need strictly positive Gamma");
        exp_gamma_ = (-dt_ * gamma_.array()).exp();
        phi1_.resize(op.size());
        phi2_.resize(op.size());
        for (int i = 0; i < op.size(); ++i) {
            phi1_[i] = phi1_of(-dt_ * gamma_[i]);
            phi2_[i] = phi2_of(-dt_ * gamma_[i]);
        }
        if (scheme_ == Scheme::EtdEuler) {
            double t2_norm = (sym_ + Eigen::MatrixXd(gamma_.asDiagonal())).norm();
            stability_warning_ = dt_ * t2_norm > 1.0;
        }
    }
}

Eigen::VectorXd Stepper::to_scaled(const Eigen::VectorXd& f) const {
    return sqrt_w_.cwiseProduct(f);
}

Eigen::VectorXd Stepper::from_scaled(const Eigen::VectorXd& fhat) const {
    return inv_sqrt_w_.cwiseProduct(fhat);
}

Eigen::VectorXd Stepper::apply_t2(const Eigen::VectorXd& fhat) const {
    return sym_ * fhat + gamma_.cwiseProduct(fhat);
}

void Stepper::advance(Eigen::VectorXd& fhat) const {
    const double c0_before = fix_ ? phi0_hat_.dot(fhat) : 0.0;
    switch (scheme_) {
        case Scheme::CrankNicolson: {
            // Increment form: (I - dt/2 S) u = dt S f, f <- f + u. Keeps the
            // drift of linear invariants of S at round-off level.
            Eigen::VectorXd rhs = dt_ * (sym_ * fhat);
            fhat += cn_factor_.solve(rhs);
            break;
        }
        case Scheme::EtdEuler: {
            Eigen::VectorXd t2 = apply_t2(fhat);
            fhat = exp_gamma_.cwiseProduct(fhat) +
                   dt_ * phi1_.cwiseProduct(t2);
            break;
        }
        case Scheme::EtdRk2: {
            Eigen::VectorXd t2 = apply_t2(fhat);
            Eigen::VectorXd stage =
                exp_gamma_.cwiseProduct(fhat) + dt_ * phi1_.cwiseProduct(t2);
            Eigen::VectorXd t2s = apply_t2(stage);
            fhat = stage + dt_ * phi2_.cwiseProduct(t2s - t2);
            break;
        }
    }
    if (fix_) {
        double c0_after = phi0_hat_.dot(fhat);
        fhat += (c0_before - c0_after) * phi0_hat_;
    }
}

State Stepper::step(const State& state) const {
    Eigen::VectorXd fhat = to_scaled(state.f);
    advance(fhat);
    return {state.t + dt_, from_scaled(fhat)};
}

DiagnosticsRow Stepper::diagnostics(double t, const Eigen::VectorXd& fhat) const {
    DiagnosticsRow row;
    row.t = t;
    row.l2_norm = fhat.norm();
    row.energy = energy_hat_.dot(fhat);
    row.c0 = phi0_hat_.dot(fhat);
    Eigen::VectorXd dev = fhat - row.c0 * phi0_hat_;
    row.dist_eq = dev.norm();
    row.gamma_norm = sqrt_gamma_.cwiseProduct(dev).norm();
    row.min_f = inv_sqrt_w_.cwiseProduct(fhat).minCoeff();
    return row;
}

State step(const State& state, const DiscreteOperator& op,
           const SolverConfig& cfg) {
    if (state.f.size() != op.size())
        throw DimensionError("step: state length != grid size");
    return Stepper(op, cfg).step(state);
}

EvolveResult evolve(const Eigen::VectorXd& f0, const DiscreteOperator& op,
                    const SolverConfig& cfg, const EvolveOptions& options) {
    if (f0.size() != op.size())
        throw DimensionError("evolve: initial data length != grid size");
    Stepper stepper(op, cfg);
    EvolveResult result;
    if (stepper.stability_warning())
        result.warnings.push_back("ETD-Euler: dt * ||T2|| > 1, step may be unstable");

    Eigen::VectorXd fhat = stepper.to_scaled(f0);
    const long n_steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    auto record = [&](long istep) -> const DiagnosticsRow& {
        DiagnosticsRow row = stepper.diagnostics(istep * cfg.dt, fhat);
        if (!std::isfinite(row.l2_norm))
            throw NumericalError(
                "evolve: NaN detected at t = " + std::to_string(istep * cfg.dt) +
                " after " + std::to_string(result.diag.rows.size()) +
                " recorded rows");
        result.diag.rows.push_back(row);
        return result.diag.rows.back();
    };

    const DiagnosticsRow& first = record(0);
    bool stopped = options.stop_when && options.stop_when(first);
    long istep = 0;
    while (!stopped && istep < n_steps) {
        stepper.advance(fhat);
        ++istep;
        if (istep % cfg.record_every == 0 || istep == n_steps) {
            const DiagnosticsRow& row = record(istep);
            if (options.stop_when && options.stop_when(row)) stopped = true;
        }
    }
    result.final = State{istep * cfg.dt, stepper.from_scaled(fhat)};
    return result;
}

InitialDataReport classify_initial_data(const Eigen::VectorXd& f0,
                                        const RadialGrid& grid) {
    if (f0.size() != grid.size())
        throw DimensionError("classify_initial_data: length != grid size");
    InitialDataReport report;

    // I = int f0^2/k over (k_min, 1) by grid quadrature.
    for (int i = 0; i < grid.size(); ++i)
        if (grid.nodes[i] < 1.0)
            report.i_value += grid.weights[i] * f0[i] * f0[i] / grid.nodes[i];

    // Limit at zero: extrapolation through three geometrically separated
    // small nodes (adjacent nodes of a graded grid are too close to carry
    // any trend). Accepted when linear and quadratic extrapolations agree
    // and the data is not blowing up toward the origin.
    if (grid.size() >= 3) {
        auto pick = [&](double target) {
            auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(),
                                       target);
            return std::min<std::size_t>(it - grid.nodes.begin(),
                                         grid.nodes.size() - 1);
        };
        std::size_t i0 = 0;
        std::size_t i1 = std::max<std::size_t>(pick(4.0 * grid.nodes[0]), 1);
        std::size_t i2 = std::max<std::size_t>(pick(16.0 * grid.nodes[0]),
                                               i1 + 1);
        if (i2 < grid.nodes.size()) {
            const double x0 = grid.nodes[i0], x1 = grid.nodes[i1],
                         x2 = grid.nodes[i2];
            const double y0 = f0[i0], y1 = f0[i1], y2 = f0[i2];
            double lin = y0 - x0 * (y1 - y0) / (x1 - x0);
            double quad = y0 * (x1 * x2) / ((x1 - x0) * (x2 - x0)) -
                          y1 * (x0 * x2) / ((x1 - x0) * (x2 - x1)) +
                          y2 * (x0 * x1) / ((x2 - x0) * (x2 - x1));
            double scale = std::max({std::abs(y0), std::abs(quad), 1e-12});
            bool agrees = std::abs(quad - lin) <= 0.02 * scale;
            bool grows = std::abs(y2) > 1e-12 &&
                         std::abs(y0) / std::abs(y2) >= 1.3;
            if (agrees && !grows) report.a_estimate = quad;
        }
    }

    // Octave-decay heuristic for the convergence of I: compare the two
    // lowest complete octaves of (k_min, 1).
    double top = 1.0;
    std::vector<double> octaves;
    while (top / 2.0 > grid.k_min * 2.0 && octaves.size() < 40) {
        double lo = top / 2.0, sum = 0.0;
        for (int i = 0; i < grid.size(); ++i)
            if (grid.nodes[i] >= lo && grid.nodes[i] < top)
                sum += grid.weights[i] * f0[i] * f0[i] / grid.nodes[i];
        octaves.push_back(sum);
        top = lo;
    }
    bool i_converges = false;
    if (octaves.size() >= 3) {
        double last = octaves[octaves.size() - 1];
        double prev = octaves[octaves.size() - 2];
        i_converges = (prev == 0.0 && last == 0.0) ||
                      (prev > 0.0 && last / prev <= 0.6);
    }
    using Condition = InitialDataReport::Condition;
    if (i_converges)
        report.condition = Condition::Condition1;
    else if (report.a_estimate)
        report.condition = Condition::Condition2;
    else
        report.condition = Condition::Neither;
    return report;
}

DecayFit decay_fit(const Diagnostics& diag, double t_lo, double t_hi) {
    if (diag.rows.empty()) throw InvalidSpecError("decay_fit: empty diagnostics");
    const double floor =
        1e3 * std::numeric_limits<double>::epsilon() * diag.rows.front().l2_norm;

    DecayFit fit;
    std::vector<double> xs, ys;
    for (const auto& row : diag.rows) {
        if (row.t < t_lo || row.t > t_hi) continue;
        if (row.dist_eq <= floor) {
            if (!fit.floor_time) fit.floor_time = row.t;
            continue;
        }
        if (fit.floor_time) continue;  // ignore noise after the floor
        xs.push_back(std::log1p(row.t));
        ys.push_back(std::log(row.dist_eq));
    }
    if (xs.size() < 10) {
        if (fit.floor_time) {
            fit.degenerate = true;
            return fit;
        }
        throw InvalidSpecError("decay_fit: fewer than 10 usable rows in window");
    }
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::vector<HalfLifeRow> experiment_no_uniform_decay(
    const DiscreteOperator& op, const SolverConfig& cfg,
    const std::vector<double>& eps_list) {
    for (double eps : eps_list) {
        if (!(eps > 0.0) || !(2.0 * eps < 1.0))
            throw InvalidSpecError("no_uniform_decay: need 0 < 2 eps < 1");
        int count = 0;
        for (double k : op.grid.nodes)
            if (k > eps && k < 2.0 * eps) ++count;
        if (count < 8)
            throw GridError("no_uniform_decay: support (" + std::to_string(eps) +
                            ", " + std::to_string(2.0 * eps) +
                            ") resolved by fewer than 8 nodes");
    }
    SolverConfig run_cfg = cfg;
    run_cfg.record_every = 1;

    std::vector<HalfLifeRow> table(eps_list.size());
    parallel_for(eps_list.size(), [&](std::size_t idx) {
        const double eps = eps_list[idx];
        Eigen::VectorXd g0 = preset_bump(op.grid, eps);
        g0 -= project_P(op.grid, g0).pf;
        double d0 = 0.0;
        for (int i = 0; i < op.size(); ++i)
            d0 += op.grid.weights[i] * g0[i] * g0[i];
        d0 = std::sqrt(d0);

        EvolveOptions options;
        options.stop_when = [half = 0.5 * d0](const DiagnosticsRow& row) {
            return row.dist_eq <= half;
        };
        EvolveResult run = evolve(g0, op, run_cfg, options);
        if (run.diag.rows.back().dist_eq > 0.5 * d0)
            throw NumericalError("no_uniform_decay: dist_eq did not halve by t_end");
        table[idx] = {eps, run.diag.rows.back().t, d0};
    });
    return table;
}

Eigen::VectorXd preset_equilibrium(const RadialGrid& grid) {
    Eigen::VectorXd f(grid.size());
    for (int i = 0; i < grid.size(); ++i) f[i] = phi0(grid.nodes[i]);
    return f;
}

Eigen::VectorXd preset_exp_decay(const RadialGrid& grid) {
    Eigen::VectorXd f(grid.size());
    for (int i = 0; i < grid.size(); ++i) f[i] = std::exp(-grid.nodes[i]);
    return f;
}

Eigen::VectorXd preset_bump(const RadialGrid& grid, double eps) {
    if (!(eps > 0.0)) throw InvalidSpecError("preset_bump: eps must be > 0");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.size());
    double norm_sq = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (grid.nodes[i] > eps && grid.nodes[i] < 2.0 * eps) {
            f[i] = 1.0;
            norm_sq += grid.weights[i];
        }
    }
    if (norm_sq == 0.0)
        throw GridError("preset_bump: no nodes inside (eps, 2 eps)");
    return f / std::sqrt(norm_sq);
}

Eigen::VectorXd preset_power(const RadialGrid& grid, double exponent) {
    Eigen::VectorXd f(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        f[i] = std::pow(grid.nodes[i], exponent);
    return f;
}

}  // namespace phkin
