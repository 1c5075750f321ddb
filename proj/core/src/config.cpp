#include "phkin/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phkin/interpolation.hpp"

namespace phkin {

using nlohmann::json;

namespace {

Scheme scheme_from_string(const std::string& s) {
    if (s == "crank_nicolson") return Scheme::CrankNicolson;
    if (s == "etd_euler") return Scheme::EtdEuler;
    if (s == "etd_rk2") return Scheme::EtdRk2;
    throw InvalidSpecError("config: unknown scheme '" + s + "'");
}

std::string scheme_to_string(Scheme s) {
    switch (s) {
        case Scheme::CrankNicolson: return "crank_nicolson";
        case Scheme::EtdEuler: return "etd_euler";
        case Scheme::EtdRk2: return "etd_rk2";
    }
    return "crank_nicolson";
}

GammaMode gamma_mode_from_string(const std::string& s) {
    if (s == "quadrature") return GammaMode::Quadrature;
    if (s == "kernel_consistent") return GammaMode::KernelConsistent;
    throw InvalidSpecError("config: unknown gamma_mode '" + s + "'");
}

InitialSpec initial_from_json(const json& j) {
    InitialSpec spec;
    spec.preset = j.value("preset", spec.preset);
    spec.eps = j.value("eps", spec.eps);
    spec.exponent = j.value("exponent", spec.exponent);
    spec.csv_path = j.value("csv", spec.csv_path);
    return spec;
}

json initial_to_json(const InitialSpec& spec) {
    return json{{"preset", spec.preset},
                {"eps", spec.eps},
                {"exponent", spec.exponent},
                {"csv", spec.csv_path}};
}

}  // namespace

Eigen::VectorXd initial_from_spec(const InitialSpec& spec,
                                  const RadialGrid& grid) {
    if (spec.preset == "equilibrium") return preset_equilibrium(grid);
    if (spec.preset == "exp-decay") return preset_exp_decay(grid);
    if (spec.preset == "bump") return preset_bump(grid, spec.eps);
    if (spec.preset == "power") return preset_power(grid, spec.exponent);
    if (spec.preset == "csv") {
        std::ifstream in(spec.csv_path);
        if (!in)
            throw InvalidSpecError("initial_from_spec: cannot open " +
                                   spec.csv_path);
        std::vector<double> ks, fs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
            try {
                double k = std::stod(a), f = std::stod(b);
                ks.push_back(k);
                fs.push_back(f);
            } catch (const std::exception&) {
                continue;  // header or malformed line
            }
        }
        if (ks.size() < 2)
            throw InvalidSpecError("initial_from_spec: CSV needs >= 2 samples");
        MonotoneCubic interp(ks, fs);
        Eigen::VectorXd f(grid.size());
        for (int i = 0; i < grid.size(); ++i) f[i] = interp(grid.nodes[i]);
        return f;
    }
    throw InvalidSpecError("initial_from_spec: unknown preset '" + spec.preset +
                           "'");
}

void RunConfig::validate() const {
    if (grid.n < 8) throw InvalidSpecError("config: grid.n must be >= 8");
    quadrature.validate();
    solver.validate();
    physical.validate();
    if (experiment.fit_t_lo >= experiment.fit_t_hi)
        throw InvalidSpecError("config: fit window must be increasing");
    if (experiment.l_max < 0)
        throw InvalidSpecError("config: l_max must be >= 0");
}

RunConfig load_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("config: JSON parse error: ") +
                               e.what());
    }
    RunConfig config;
    try {
        if (j.contains("grid")) {
            config.grid_explicit = true;
            const json& g = j["grid"];
            config.grid.n = g.value("n", config.grid.n);
            config.grid.k_min = g.value("k_min", config.grid.k_min);
            config.grid.k_max = g.value("k_max", config.grid.k_max);
            config.grid.panel_growth =
                g.value("panel_growth", config.grid.panel_growth);
            config.grid.n_panels = g.value("n_panels", config.grid.n_panels);
            config.grid.grid_tol = g.value("grid_tol", config.grid.grid_tol);
        }
        if (j.contains("quadrature")) {
            const json& q = j["quadrature"];
            config.quadrature = QuadratureConfig(
                q.value("abs_tol", 1e-10), q.value("rel_tol", 1e-10),
                q.value("tail_cutoff", 60.0), q.value("max_panels", 512));
        }
        if (j.contains("operator"))
            config.gamma_mode = gamma_mode_from_string(
                j["operator"].value("gamma_mode", "kernel_consistent"));
        if (j.contains("solver")) {
            const json& s = j["solver"];
            config.solver.scheme =
                scheme_from_string(s.value("scheme", "crank_nicolson"));
            config.solver.dt = s.value("dt", config.solver.dt);
            config.solver.t_end = s.value("t_end", config.solver.t_end);
            config.solver.record_every =
                s.value("record_every", config.solver.record_every);
            if (s.contains("conservation_fix") && !s["conservation_fix"].is_null())
                config.solver.conservation_fix = s["conservation_fix"].get<bool>();
        }
        if (j.contains("physical")) {
            const json& p = j["physical"];
            config.physical.g = p.value("g", config.physical.g);
            config.physical.n_c = p.value("n_c", config.physical.n_c);
            config.physical.m = p.value("m", config.physical.m);
            config.physical.k_b = p.value("k_b", config.physical.k_b);
            config.physical.temperature =
                p.value("temperature", config.physical.temperature);
        }
        if (j.contains("experiment")) {
            const json& e = j["experiment"];
            ExperimentConfig& x = config.experiment;
            if (e.contains("initial")) x.initial = initial_from_json(e["initial"]);
            x.remove_c0 = e.value("remove_c0", x.remove_c0);
            if (e.contains("fit_window")) {
                x.fit_t_lo = e["fit_window"].at(0).get<double>();
                x.fit_t_hi = e["fit_window"].at(1).get<double>();
            }
            if (e.contains("eps_list"))
                x.eps_list = e["eps_list"].get<std::vector<double>>();
            x.l_max = e.value("l_max", x.l_max);
            x.kernel_samples = e.value("kernel_samples", x.kernel_samples);
            if (e.contains("spectrum_ladder"))
                x.spectrum_ladder = e["spectrum_ladder"].get<std::vector<int>>();
            if (e.contains("modes")) {
                x.modes.clear();
                for (const json& mj : e["modes"]) {
                    ModeSpec mode;
                    mode.ell = mj.value("ell", 0);
                    mode.m = mj.value("m", 0);
                    mode.amplitude = mj.value("amplitude", 1.0);
                    if (mj.contains("radial"))
                        mode.radial = initial_from_json(mj["radial"]);
                    x.modes.push_back(mode);
                }
            }
        }
        config.out_dir = j.value("out", config.out_dir);
        config.seed = j.value("seed", config.seed);
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("config: bad field: ") + e.what());
    }
    config.validate();
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpecError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

std::string dump_config(const RunConfig& config) {
    json j;
    j["grid"] = {{"n", config.grid.n},
                 {"k_min", config.grid.k_min},
                 {"k_max", config.grid.k_max},
                 {"panel_growth", config.grid.panel_growth},
                 {"n_panels", config.grid.n_panels},
                 {"grid_tol", config.grid.grid_tol}};
    j["quadrature"] = {{"abs_tol", config.quadrature.abs_tol},
                       {"rel_tol", config.quadrature.rel_tol},
                       {"tail_cutoff", config.quadrature.tail_cutoff},
                       {"max_panels", config.quadrature.max_panels}};
    j["operator"] = {{"gamma_mode", config.gamma_mode == GammaMode::Quadrature
                                        ? "quadrature"
                                        : "kernel_consistent"}};
    j["solver"] = {{"scheme", scheme_to_string(config.solver.scheme)},
                   {"dt", config.solver.dt},
                   {"t_end", config.solver.t_end},
                   {"record_every", config.solver.record_every}};
    if (config.solver.conservation_fix)
        j["solver"]["conservation_fix"] = *config.solver.conservation_fix;
    else
        j["solver"]["conservation_fix"] = nullptr;
    j["physical"] = {{"g", config.physical.g},
                     {"n_c", config.physical.n_c},
                     {"m", config.physical.m},
                     {"k_b", config.physical.k_b},
                     {"temperature", config.physical.temperature}};
    json modes = json::array();
    for (const ModeSpec& mode : config.experiment.modes)
        modes.push_back({{"ell", mode.ell},
                         {"m", mode.m},
                         {"amplitude", mode.amplitude},
                         {"radial", initial_to_json(mode.radial)}});
    j["experiment"] = {
        {"initial", initial_to_json(config.experiment.initial)},
        {"remove_c0", config.experiment.remove_c0},
        {"fit_window", {config.experiment.fit_t_lo, config.experiment.fit_t_hi}},
        {"eps_list", config.experiment.eps_list},
        {"l_max", config.experiment.l_max},
        {"kernel_samples", config.experiment.kernel_samples},
        {"spectrum_ladder", config.experiment.spectrum_ladder},
        {"modes", modes}};
    j["out"] = config.out_dir;
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

}  // namespace phkin
