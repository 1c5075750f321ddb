// Batch front-end: experiment orchestration and deterministic CSV/JSON
// emission for the phonon-kinetics laboratory.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 acceptance failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "phkin/acceptance.hpp"
#include "phkin/collision_operator.hpp"
#include "phkin/config.hpp"
#include "phkin/csv.hpp"
#include "phkin/evolution.hpp"
#include "phkin/field_io.hpp"
#include "phkin/kernels.hpp"
#include "phkin/spherical.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phkin;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const CliArgs& args) {
    RunConfig config = args.config_path.empty()
                           ? RunConfig{}
                           : load_config_file(args.config_path);
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (args.seed) config.seed = *args.seed;
    config.validate();
    return config;
}

fs::path prepare_out_dir(const RunConfig& config) {
    fs::path dir(config.out_dir);
    fs::create_directories(dir);
    std::ofstream echo(dir / "resolved_config.json", std::ios::binary);
    echo << dump_config(config);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());
    out << text;
}

DiscreteOperator build_operator(const RunConfig& config) {
    RadialGrid grid = build_grid(config.grid);
    return assemble(grid, config.quadrature, config.gamma_mode);
}

CsvWriter diagnostics_csv(const Diagnostics& diag) {
    CsvWriter csv({"t", "l2_norm", "energy", "c0", "dist_eq", "min_f",
                   "gamma_norm"});
    for (const auto& r : diag.rows)
        csv.add_row({r.t, r.l2_norm, r.energy, r.c0, r.dist_eq, r.min_f,
                     r.gamma_norm});
    return csv;
}

int cmd_kernels(const RunConfig& config) {
    fs::path dir = prepare_out_dir(config);
    const QuadratureConfig& cfg = config.quadrature;

    const int n = std::max(2, config.experiment.kernel_samples);
    const double lo = std::log10(1e-3), hi = std::log10(50.0);
    CsvWriter csv({"k", "phi", "phi0", "gamma", "row_norm", "bound_rhs"});
    for (int i = 0; i < n; ++i) {
        double k = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
        double rns = row_norm_sq(k, cfg);
        double bound = 25.975757609067317 * std::pow(k, 4) +
                       183.12175115720085 * k * k;
        csv.add_row({k, phi(k), phi0(k), collision_frequency(k, cfg), rns,
                     bound});
    }
    csv.write_file((dir / "kernels.csv").string());

    json report;
    json ladder = json::array();
    double base = 0.0, doubled = 0.0;
    for (double tail : {0.5 * cfg.tail_cutoff, cfg.tail_cutoff,
                        2.0 * cfg.tail_cutoff}) {
        QuadratureConfig tcfg(cfg.abs_tol, cfg.rel_tol, tail, cfg.max_panels);
        HsNorm hs = hs_norm_c0(tcfg);
        ladder.push_back({{"tail_cutoff", tail},
                          {"c0", hs.value},
                          {"tail_estimate", hs.tail_estimate}});
        if (tail == cfg.tail_cutoff) base = hs.value;
        if (tail == 2.0 * cfg.tail_cutoff) doubled = hs.value;
    }
    report["c0"] = base;
    report["rel_change_on_doubling"] = std::abs(doubled - base) / base;
    report["convergence"] = ladder;
    write_text(dir / "c0_norm.json", report.dump(2) + "\n");
    return 0;
}

int cmd_spectrum(const RunConfig& config) {
    fs::path dir = prepare_out_dir(config);
    std::vector<std::string> header = {"n", "k_min", "k_max", "c_star",
                                       "null_residual"};
    for (int i = 1; i <= 10; ++i) header.push_back("eig" + std::to_string(i));
    CsvWriter csv(header);
    for (int n : config.experiment.spectrum_ladder) {
        GridSpec spec = config.grid;
        spec.n = n;
        spec.n_panels = 0;
        RadialGrid grid = build_grid(spec);
        DiscreteOperator op = assemble(grid, config.quadrature, config.gamma_mode);
        Eigen::VectorXd res = op.apply(op.phi_nodes);
        double null_res =
            res.cwiseAbs().maxCoeff() /
            op.gamma_vec.cwiseProduct(op.phi_nodes).cwiseAbs().maxCoeff();
        SpectralGap gap = spectral_gap(symmetrize(op, true));
        std::vector<double> row = {double(n), spec.k_min, spec.k_max,
                                   gap.c_star, null_res};
        for (int i = 0; i < 10; ++i)
            row.push_back(i < int(gap.spectrum_head.size())
                              ? gap.spectrum_head[i]
                              : 0.0);
        csv.add_row(row);
    }
    csv.write_file((dir / "spectrum.csv").string());
    return 0;
}

int cmd_evolve(const RunConfig& config) {
    fs::path dir = prepare_out_dir(config);
    DiscreteOperator op = build_operator(config);
    Eigen::VectorXd f0 = initial_from_spec(config.experiment.initial, op.grid);
    if (config.experiment.remove_c0) f0 -= project_P(op.grid, f0).pf;
    EvolveResult run = evolve(f0, op, config.solver);
    diagnostics_csv(run.diag).write_file((dir / "evolve.csv").string());

    const auto& first = run.diag.rows.front();
    double drift_e = 0.0, drift_c = 0.0, min_f = 0.0;
    for (const auto& r : run.diag.rows) {
        drift_e = std::max(drift_e, std::abs(r.energy - first.energy));
        drift_c = std::max(drift_c, std::abs(r.c0 - first.c0));
        min_f = std::min(min_f, r.min_f);
    }
    json summary = {{"t_final", run.final.t},
                    {"energy_drift_abs", drift_e},
                    {"c0_drift_abs", drift_c},
                    {"min_f", min_f},
                    {"warnings", run.warnings}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_decay_study(RunConfig config) {
    if (!config.grid_explicit) {
        // Truncation must not bind inside the fit window; see README.
        config.grid.k_min = 1e-5;
        config.grid.k_max = 20.0;
    }
    fs::path dir = prepare_out_dir(config);
    DiscreteOperator op = build_operator(config);
    Eigen::VectorXd f0 = initial_from_spec(config.experiment.initial, op.grid);
    InitialDataReport before = classify_initial_data(f0, op.grid);
    f0 -= project_P(op.grid, f0).pf;  // decay studies track the deviation
    EvolveResult run = evolve(f0, op, config.solver);
    diagnostics_csv(run.diag).write_file((dir / "decay.csv").string());

    DecayFit fit = decay_fit(run.diag, config.experiment.fit_t_lo,
                             config.experiment.fit_t_hi);
    json summary = {{"slope", fit.slope},
                    {"r2", fit.r2},
                    {"degenerate", fit.degenerate},
                    {"window", {config.experiment.fit_t_lo,
                                config.experiment.fit_t_hi}},
                    {"i_value", before.i_value},
                    {"condition",
                     before.condition == InitialDataReport::Condition::Condition1
                         ? "condition1"
                         : before.condition ==
                                   InitialDataReport::Condition::Condition2
                               ? "condition2"
                               : "neither"}};
    if (fit.floor_time) summary["floor_time"] = *fit.floor_time;
    if (before.a_estimate) summary["a_estimate"] = *before.a_estimate;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    // Half-life sweep against the uniform-decay obstruction.
    SolverConfig sweep_cfg = config.solver;
    sweep_cfg.t_end = std::min(sweep_cfg.t_end, 50.0);
    auto table =
        experiment_no_uniform_decay(op, sweep_cfg, config.experiment.eps_list);
    CsvWriter sweep({"eps", "t_half"});
    for (const auto& row : table) sweep.add_row({row.eps, row.t_half});
    sweep.write_file((dir / "t_half.csv").string());
    return 0;
}

double radial_profile(const InitialSpec& spec, double r) {
    if (spec.preset == "exp-decay") return std::exp(-r);
    if (spec.preset == "linear") return r;
    if (spec.preset == "bump")
        return (r > spec.eps && r < 2.0 * spec.eps) ? 1.0 : 0.0;
    if (spec.preset == "power") return std::pow(r, spec.exponent);
    throw InvalidSpecError("3d: unknown radial preset '" + spec.preset + "'");
}

int cmd_3d(const RunConfig& config) {
    fs::path dir = prepare_out_dir(config);
    DiscreteOperator op = build_operator(config);
    SphericalField field0 = SphericalField::zero(
        config.physical, config.experiment.l_max, op.grid);
    std::vector<ModeSpec> modes = config.experiment.modes;
    if (modes.empty()) modes.push_back({0, 0, InitialSpec{"exp-decay"}, 1.0});
    for (const ModeSpec& spec : modes) {
        Eigen::VectorXd v(field0.n_radial());
        for (int i = 0; i < v.size(); ++i)
            v[i] = spec.amplitude * radial_profile(spec.radial,
                                                   field0.r_nodes[i]);
        field0.at(spec.ell, spec.m).radial = v;
    }
    write_text(dir / "field_initial.json", field_to_json(field0));

    Evolve3dResult run = evolve_3d(field0, op, config.solver);
    write_text(dir / "field_final.json", field_to_json(run.final));

    CsvWriter per_mode({"ell", "m", "t", "l2_norm", "energy", "c0", "dist_eq",
                        "min_f", "gamma_norm"});
    for (const auto& md : run.per_mode)
        for (const auto& r : md.diag.rows)
            per_mode.add_row({double(md.ell), double(md.m_index), r.t,
                              r.l2_norm, r.energy, r.c0, r.dist_eq, r.min_f,
                              r.gamma_norm});
    per_mode.write_file((dir / "modes_diagnostics.csv").string());

    CsvWriter agg({"t", "dist_to_theta", "energy_3d"});
    for (const auto& row : run.aggregate)
        agg.add_row({row.t, row.dist_to_theta, row.energy_3d});
    agg.write_file((dir / "aggregate.csv").string());

    double e0 = run.aggregate.front().energy_3d;
    double drift = 0.0;
    for (const auto& row : run.aggregate)
        drift = std::max(drift, std::abs(row.energy_3d - e0));
    json summary = {
        {"mass_initial", mass_functional(field0)},
        {"mass_final", mass_functional(run.final)},
        {"background_mass", background_mass(config.physical, config.quadrature)},
        {"energy_3d_initial", e0},
        {"energy_3d_drift_abs", drift},
        {"dist_to_theta_initial", run.aggregate.front().dist_to_theta},
        {"dist_to_theta_final", run.aggregate.back().dist_to_theta}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_verify(const RunConfig& config) {
    fs::path dir = prepare_out_dir(config);
    AcceptanceReport report = run_acceptance(&std::cout);
    json j = json::array();
    for (const auto& r : report.results)
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"detail", r.detail}});
    write_text(dir / "verify_report.json", j.dump(2) + "\n");
    if (!report.all_pass()) {
        std::cerr << "acceptance: at least one criterion failed\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phkin: linearized phonon-kinetics laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    CliArgs args;
    app.add_option("--config", args.config_path, "JSON configuration file");
    app.add_option("--out", args.out_dir, "output directory (overrides config)");
    std::uint64_t seed_value = 0;
    auto* seed_opt =
        app.add_option("--seed", seed_value, "seed for randomized sweeps");

    auto* kernels = app.add_subcommand("kernels", "dump kernel tables and C0");
    auto* spectrum = app.add_subcommand("spectrum", "spectral-gap ladder");
    auto* evolve_cmd = app.add_subcommand("evolve", "time integration run");
    auto* decay = app.add_subcommand("decay-study",
                                     "decay-rate fit and half-life sweep");
    auto* three_d = app.add_subcommand("3d", "spherical-harmonics evolution");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*seed_opt) args.seed = seed_value;
        RunConfig config = resolve_config(args);
        if (*kernels) return cmd_kernels(config);
        if (*spectrum) return cmd_spectrum(config);
        if (*evolve_cmd) return cmd_evolve(config);
        if (*decay) return cmd_decay_study(config);
        if (*three_d) return cmd_3d(config);
        if (*verify) return cmd_verify(config);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const InvalidSpecError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
