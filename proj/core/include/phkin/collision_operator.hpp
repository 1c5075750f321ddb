#ifndef PHKIN_COLLISION_OPERATOR_HPP
#define PHKIN_COLLISION_OPERATOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "phkin/grid.hpp"
#include "phkin/kernels.hpp"
#include "phkin/quadrature.hpp"

namespace phkin {

enum class GammaMode {
    Quadrature,        ///< gamma_vec[i] = Gamma(k_i) by certified quadrature
    KernelConsistent,  ///< gamma_vec[i] = (2/phi_i) sum_j K_ij w_j phi_j
};

/// Dense realization of E f = -Gamma f + 2 int K f on the truncated grid:
/// (E_h f)_i = -gamma_vec[i] f_i + 2 sum_j kernel_mat(i,j) w_j f_j.
/// In KernelConsistent mode the discrete identities E_h phi = 0 and
/// e^T E_h = 0 (e_i = w_i phi_i) hold to machine round-off for every f.
struct DiscreteOperator {
    RadialGrid grid;
    Eigen::VectorXd gamma_vec;
    Eigen::MatrixXd kernel_mat;   ///< K(k_i, k_j), exactly symmetric
    GammaMode gamma_mode = GammaMode::KernelConsistent;
    Eigen::VectorXd energy_weights;  ///< e_i = w_i phi(k_i)

    // Cached node samples shared by the forms and the solvers.
    Eigen::VectorXd phi_nodes, phi0_nodes, w, sqrt_w;

    int size() const { return static_cast<int>(grid.nodes.size()); }

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

    /// -diag(gamma) + 2 K diag(w).
    Eigen::MatrixXd dense() const;

    /// W^{1/2} E_h W^{-1/2} = -diag(gamma) + 2 W^{1/2} K W^{1/2}; symmetric.
    Eigen::MatrixXd symmetric_dense() const;
};

DiscreteOperator assemble(const RadialGrid& grid, const QuadratureConfig& cfg,
                          GammaMode mode);

/// <-E_h f, g> = -sum_i w_i g_i (E_h f)_i.
double dirichlet_form(const DiscreteOperator& op, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g);

/// Independent evaluation of the same form as a double integral against the
/// measure phi(k+k') phi(k') phi(k) over the truncated square, with
/// q[h](k) = sinh(k) h(k)/k and h(k+k') by monotone cubic interpolation
/// (zero extension beyond k_max).
double triple_form(const RadialGrid& grid, const Eigen::VectorXd& f,
                   const Eigen::VectorXd& g, const QuadratureConfig& cfg);

/// c0 = sum_i w_i f_i phi0(k_i).
double c0_functional(const RadialGrid& grid, const Eigen::VectorXd& f);

struct Projection {
    double c0;
    Eigen::VectorXd pf;  ///< c0 * phi0 at nodes
};
Projection project_P(const RadialGrid& grid, const Eigen::VectorXd& f);

/// sqrt(w)-symmetrized form of -E after the change of unknown g = sqrt(Gamma) h:
///   M_ij = delta_ij - 2 K_ij sqrt(w_i w_j)/(alpha_i alpha_j)
///          [+ (phi0_i/alpha_i)(phi0_j/alpha_j) sqrt(w_i w_j)],
/// alpha = sqrt(Gamma). The optional rank-one term restores coercivity on
/// the kernel direction.
struct SymmetrizedForm {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd alpha_vec;
    Eigen::VectorXd sqrt_w;
    bool rank_one_included = true;
};
SymmetrizedForm symmetrize(const DiscreteOperator& op,
                           bool include_rank_one = true);

struct SpectralGap {
    double c_star = 0.0;                 ///< smallest eigenvalue
    std::vector<double> spectrum_head;   ///< ten smallest eigenvalues
    Eigen::VectorXd groundvec;           ///< ground eigenvector, nodal (g) coords
    bool gap_warning = false;            ///< c_star <= eig_tol
};
SpectralGap spectral_gap(const SymmetrizedForm& sym, double eig_tol = 1e-8);

}  // namespace phkin

#endif
