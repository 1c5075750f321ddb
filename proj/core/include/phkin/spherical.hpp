#ifndef PHKIN_SPHERICAL_HPP
#define PHKIN_SPHERICAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "phkin/evolution.hpp"

namespace phkin {

/// Condensate parameters; phonon dispersion omega(p) = c |p| with sound
/// speed c = sqrt(g n_c / m). The default nondimensionalization has
/// c = 1 and 2 k_B T = 1 so the wavenumber map is the identity.
struct PhysicalParams {
    double g = 1.0;
    double n_c = 1.0;
    double m = 1.0;
    double k_b = 1.0;
    double temperature = 0.5;

    double sound_speed() const;
    /// r = momentum_scale() * k.
    double momentum_scale() const;
    void validate() const;
};

/// k(p) = c |p| / (2 k_B T).
double wavenumber(const PhysicalParams& params, double r);
double momentum(const PhysicalParams& params, double k);

/// Equilibrium occupancy n0 = 1/(e^{2k} - 1), k > 0.
double occupancy(double k);
/// n0 (1 + n0) = 1/(4 sinh^2 k), evaluated in scaled form.
double occupancy_pair(double k);

/// Legendre polynomial P_n(x) on [-1, 1] by three-term recurrence,
/// 0 <= n <= 64; P_n(1) = 1 exactly.
double legendre(int n, double x);

/// Real orthonormal spherical harmonic Y_{lm}(u, phi), u = cos(theta).
double real_spherical_harmonic(int ell, int m, double u, double phi_az);

struct Mode {
    int ell = 0;
    int m_index = 0;
    Eigen::VectorXd radial;  ///< Omega_{lm}(r_i)
};

/// Field on R^3 as a collection of (l, m) radial modes over a shared
/// radial grid r_i mapped node-by-node from a wavenumber grid.
struct SphericalField {
    PhysicalParams params;
    int l_max = 0;
    std::vector<double> r_nodes;
    std::vector<double> r_weights;
    std::vector<Mode> modes;  ///< (l_max+1)^2 entries, (l, m) ordered

    static SphericalField zero(const PhysicalParams& params, int l_max,
                               const RadialGrid& grid);

    int n_radial() const { return static_cast<int>(r_nodes.size()); }
    int mode_index(int ell, int m) const;
    Mode& at(int ell, int m);
    const Mode& at(int ell, int m) const;

    /// Throws GridError unless r maps node-by-node onto grid's wavenumbers.
    void require_compatible(const RadialGrid& grid) const;
};

/// f(k) = k Omega / sinh k and its inverse, node-by-node.
Eigen::VectorXd to_radial(const SphericalField& field, const Mode& mode);
Eigen::VectorXd from_radial(const SphericalField& field,
                            const Eigen::VectorXd& f);

/// Gauss-Legendre (polar) x uniform (azimuth) product grid; exact for
/// products of harmonics up to the stated band limit.
struct AngularGrid {
    std::vector<double> polar_cos;
    std::vector<double> polar_weight;
    int n_azimuth = 1;

    static AngularGrid for_band_limit(int l_max);
    int n_polar() const { return static_cast<int>(polar_cos.size()); }
    int total() const { return n_polar() * n_azimuth; }
    double azimuth(int b) const;
    double azimuth_weight() const;
};

/// Angular projection of point samples (row a*n_azimuth+b, column = radial
/// node) onto real spherical harmonics up to l_max.
SphericalField decompose(const AngularGrid& angular,
                         const Eigen::MatrixXd& samples, int l_max,
                         const RadialGrid& grid, const PhysicalParams& params);
Eigen::MatrixXd reconstruct(const AngularGrid& angular,
                            const SphericalField& field);

/// Stationary state Theta: per mode, the c0-projection of the transformed
/// mode mapped back, giving radial profiles exactly linear in r.
SphericalField stationary_theta(const SphericalField& field);

struct ModeDiagnostics {
    int ell = 0;
    int m_index = 0;
    Diagnostics diag;
};

struct Aggregate3dRow {
    double t;
    double dist_to_theta;  ///< ||Omega(t) - Theta|| in L^2(dp/sinh^2 k)
    double energy_3d;      ///< int n0(1+n0) Omega |p| dp
};

struct Evolve3dResult {
    SphericalField final;
    std::vector<ModeDiagnostics> per_mode;
    std::vector<Aggregate3dRow> aggregate;
};

/// Evolve every mode under the same radial operator (the structural point
/// of the reduction); per-mode runs are independent and parallel.
Evolve3dResult evolve_3d(const SphericalField& field0,
                         const DiscreteOperator& op, const SolverConfig& cfg);

/// Fluctuation mass int n0(1+n0) Omega dp; only the (0,0) mode contributes.
double mass_functional(const SphericalField& field);
/// Conserved 3-D energy int n0(1+n0) Omega |p| dp.
double energy_3d(const SphericalField& field);
/// Background constant int n0 dp for the given parameters.
double background_mass(const PhysicalParams& params,
                       const QuadratureConfig& cfg);

/// Radial collision weight W0(r, r') of the reduced 3-D equation.
double w0(double r, double r2, const PhysicalParams& params);

struct BigM {
    double from_w0;  ///< (1/omega(r)) int_0^rmax W0(r,r') omega(r') r'^2 dr'
    double closed;   ///< Gamma(k) n0(r)(1+n0(r))
};
BigM big_m(double r, const PhysicalParams& params, const QuadratureConfig& cfg);

/// Global factor lambda with lambda * from_w0 = closed, fixed at r_ref.
double calibrate_m_factor(const PhysicalParams& params,
                          const QuadratureConfig& cfg, double r_ref);

}  // namespace phkin

#endif
