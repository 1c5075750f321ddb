#ifndef PHKIN_EVOLUTION_HPP
#define PHKIN_EVOLUTION_HPP

#include <Eigen/Cholesky>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phkin/collision_operator.hpp"

namespace phkin {

enum class Scheme { CrankNicolson, EtdEuler, EtdRk2 };

struct SolverConfig {
    Scheme scheme = Scheme::CrankNicolson;
    double dt = 1e-2;
    double t_end = 200.0;
    int record_every = 10;
    /// Post-step projection restoring c0. Defaults off for Crank-Nicolson
    /// (the scheme preserves the invariant exactly), on for the ETD schemes.
    std::optional<bool> conservation_fix;

    bool fix_enabled() const {
        return conservation_fix.value_or(scheme != Scheme::CrankNicolson);
    }
    void validate() const;
};

struct State {
    double t = 0.0;
    Eigen::VectorXd f;
};

struct DiagnosticsRow {
    double t, l2_norm, energy, c0, dist_eq, min_f, gamma_norm;
};

struct Diagnostics {
    std::vector<DiagnosticsRow> rows;
};

/// One-step integrator for df/dt = E_h f, working internally in the
/// sqrt(w)-scaled coordinates where E_h is symmetric. Factorizations and
/// exponential coefficient vectors are cached at construction.
class Stepper {
public:
    Stepper(const DiscreteOperator& op, const SolverConfig& cfg);

    State step(const State& state) const;

    /// Advance the scaled representation in place.
    void advance(Eigen::VectorXd& fhat) const;

    bool stability_warning() const { return stability_warning_; }

    Eigen::VectorXd to_scaled(const Eigen::VectorXd& f) const;
    Eigen::VectorXd from_scaled(const Eigen::VectorXd& fhat) const;
    DiagnosticsRow diagnostics(double t, const Eigen::VectorXd& fhat) const;

private:
    Scheme scheme_;
    double dt_;
    bool fix_;
    bool stability_warning_ = false;
    Eigen::VectorXd sqrt_w_, inv_sqrt_w_, gamma_, sqrt_gamma_;
    Eigen::VectorXd phi0_hat_, energy_hat_;
    Eigen::MatrixXd sym_;           // W^{1/2} E_h W^{-1/2}
    Eigen::LLT<Eigen::MatrixXd> cn_factor_;
    Eigen::VectorXd exp_gamma_, phi1_, phi2_;

    Eigen::VectorXd apply_t2(const Eigen::VectorXd& fhat) const;
};

/// Free-function convenience; builds a fresh Stepper per call.
State step(const State& state, const DiscreteOperator& op,
           const SolverConfig& cfg);

struct EvolveOptions {
    /// If set and returning true on a recorded row, integration stops there.
    std::function<bool(const DiagnosticsRow&)> stop_when;
};

struct EvolveResult {
    State final;
    Diagnostics diag;
    std::vector<std::string> warnings;
};

EvolveResult evolve(const Eigen::VectorXd& f0, const DiscreteOperator& op,
                    const SolverConfig& cfg, const EvolveOptions& options = {});

struct InitialDataReport {
    double i_value = 0.0;                 ///< estimate of int_{k_min}^1 f0^2/k
    std::optional<double> a_estimate;     ///< extrapolated limit at k -> 0
    enum class Condition { Condition1, Condition2, Neither } condition =
        Condition::Neither;
};
InitialDataReport classify_initial_data(const Eigen::VectorXd& f0,
                                        const RadialGrid& grid);

struct DecayFit {
    double slope = 0.0;
    double r2 = 0.0;
    std::optional<double> floor_time;  ///< first time dist_eq hit the floor
    bool degenerate = false;           ///< too little signal above the floor
};
DecayFit decay_fit(const Diagnostics& diag, double t_lo, double t_hi);

struct HalfLifeRow {
    double eps;
    double t_half;
    double dist0;
};
/// Lemma-5.1-style sweep: for each eps evolve the projected, normalized
/// indicator of (eps, 2 eps) and record the first time dist_eq halves.
std::vector<HalfLifeRow> experiment_no_uniform_decay(
    const DiscreteOperator& op, const SolverConfig& cfg,
    const std::vector<double>& eps_list);

// Named initial-data presets.
Eigen::VectorXd preset_equilibrium(const RadialGrid& grid);
Eigen::VectorXd preset_exp_decay(const RadialGrid& grid);
Eigen::VectorXd preset_bump(const RadialGrid& grid, double eps);
Eigen::VectorXd preset_power(const RadialGrid& grid, double exponent);

}  // namespace phkin

#endif
