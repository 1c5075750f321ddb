#ifndef PHKIN_CONFIG_HPP
#define PHKIN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phkin/collision_operator.hpp"
#include "phkin/evolution.hpp"
#include "phkin/grid.hpp"
#include "phkin/quadrature.hpp"
#include "phkin/spherical.hpp"

namespace phkin {

/// Initial-data selector: a named preset or a CSV of (k, f0) samples that
/// is interpolated onto the grid.
struct InitialSpec {
    std::string preset = "exp-decay";  // equilibrium|exp-decay|bump|power|csv
    double eps = 0.1;
    double exponent = -0.25;
    std::string csv_path;
};
Eigen::VectorXd initial_from_spec(const InitialSpec& spec,
                                  const RadialGrid& grid);

struct ModeSpec {
    int ell = 0;
    int m = 0;
    InitialSpec radial;  ///< preset interpreted as Omega(r) on the r-grid
    double amplitude = 1.0;
};

struct ExperimentConfig {
    InitialSpec initial;
    bool remove_c0 = false;
    double fit_t_lo = 10.0;
    double fit_t_hi = 200.0;
    std::vector<double> eps_list = {0.4, 0.2, 0.1, 0.05};
    int l_max = 8;
    int kernel_samples = 50;
    std::vector<int> spectrum_ladder = {100, 200, 400};
    std::vector<ModeSpec> modes;
};

/// One JSON document configures every subcommand; the resolved form is
/// echoed verbatim into each output directory.
struct RunConfig {
    GridSpec grid;
    bool grid_explicit = false;  ///< true when the document pinned a grid
    QuadratureConfig quadrature;
    GammaMode gamma_mode = GammaMode::KernelConsistent;
    SolverConfig solver;
    PhysicalParams physical;
    ExperimentConfig experiment;
    std::string out_dir = "out";
    std::uint64_t seed = 20240601;

    void validate() const;
};

/// Parse from a JSON document (missing keys take defaults). Throws
/// InvalidSpecError on malformed input.
RunConfig load_config_text(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Serialize the fully resolved configuration, deterministically.
std::string dump_config(const RunConfig& config);

}  // namespace phkin

#endif
