#include "phkin/collision_operator.hpp"

#include <cmath>

#include "phkin/interpolation.hpp"

namespace phkin {

namespace {

void require_size(const DiscreteOperator& op, const Eigen::VectorXd& f,
                  const char* who) {
    if (f.size() != op.size())
        throw DimensionError(std::string(who) + ": vector length " +
                             std::to_string(f.size()) + " != grid size " +
                             std::to_string(op.size()));
}

}  // namespace

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& f) const {
    require_size(*this, f, "apply");
    return -gamma_vec.cwiseProduct(f) +
           2.0 * (kernel_mat * w.cwiseProduct(f));
}

Eigen::MatrixXd DiscreteOperator::dense() const {
    Eigen::MatrixXd m = 2.0 * kernel_mat * w.asDiagonal();
    m.diagonal() -= gamma_vec;
    return m;
}

Eigen::MatrixXd DiscreteOperator::symmetric_dense() const {
    Eigen::MatrixXd m =
        2.0 * sqrt_w.asDiagonal() * kernel_mat * sqrt_w.asDiagonal();
    m.diagonal() -= gamma_vec;
    return m;
}

DiscreteOperator assemble(const RadialGrid& grid, const QuadratureConfig& cfg,
                          GammaMode mode) {
    const int n = grid.size();
    DiscreteOperator op;
    op.grid = grid;
    op.gamma_mode = mode;
    op.kernel_mat.resize(n, n);
    op.gamma_vec.resize(n);
    op.phi_nodes.resize(n);
    op.phi0_nodes.resize(n);
    op.w.resize(n);
    op.sqrt_w.resize(n);
    for (int i = 0; i < n; ++i) {
        op.phi_nodes[i] = phi(grid.nodes[i]);
        op.phi0_nodes[i] = phi0(grid.nodes[i]);
        op.w[i] = grid.weights[i];
        op.sqrt_w[i] = std::sqrt(grid.weights[i]);
    }

    parallel_for(n, [&](std::size_t i) {
        for (int j = 0; j < n; ++j)
            op.kernel_mat(i, j) = kernel_K(grid.nodes[i], grid.nodes[j]);
    });
    // kernel_K is bit-symmetric; any asymmetry indicates a kernel bug.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (op.kernel_mat(i, j) != op.kernel_mat(j, i))
                throw NumericalError("assemble: kernel matrix asymmetry at (" +
                                     std::to_string(i) + "," +
                                     std::to_string(j) + ")");

    if (mode == GammaMode::Quadrature) {
        parallel_for(n, [&](std::size_t i) {
            op.gamma_vec[i] = collision_frequency(grid.nodes[i], cfg);
        });
        for (int i = 0; i < n; ++i)
            if (!(op.gamma_vec[i] >= 0.0))
                throw NumericalError("assemble: negative Gamma at node " +
                                     std::to_string(i));
    } else {
        // Gamma lumping from the kernel rows: makes E_h phi = 0 and
        // e^T E_h = 0 exact by construction (K symmetric).
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += op.kernel_mat(i, j) * op.w[j] * op.phi_nodes[j];
            op.gamma_vec[i] = 2.0 * s / op.phi_nodes[i];
        }
    }

    op.energy_weights = op.w.cwiseProduct(op.phi_nodes);
    return op;
}

double dirichlet_form(const DiscreteOperator& op, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g) {
    require_size(op, f, "dirichlet_form");
    require_size(op, g, "dirichlet_form");
    return -(op.w.cwiseProduct(g)).dot(op.apply(f));
}

double triple_form(const RadialGrid& grid, const Eigen::VectorXd& f,
                   const Eigen::VectorXd& g, const QuadratureConfig&) {
    const int n = grid.size();
    if (f.size() != n || g.size() != n)
        throw DimensionError("triple_form: vector length != grid size");

    MonotoneCubic f_interp(grid.nodes, {f.data(), f.data() + n});
    MonotoneCubic g_interp(grid.nodes, {g.data(), g.data() + n});
    auto q_of = [](double k, double v) { return std::sinh(k) * v / k; };

    std::vector<double> qf(n), qg(n), phis(n);
    for (int i = 0; i < n; ++i) {
        qf[i] = q_of(grid.nodes[i], f[i]);
        qg[i] = q_of(grid.nodes[i], g[i]);
        phis[i] = phi(grid.nodes[i]);
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ki = grid.nodes[i];
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ks = ki + grid.nodes[j];
            const double mu = phi(ks) * phis[j] * phis[i];
            if (mu == 0.0) continue;
            const double qfs = qf[i] + qf[j] - q_of(ks, f_interp(ks));
            const double qgs = qg[i] + qg[j] - q_of(ks, g_interp(ks));
            row += grid.weights[j] * mu * qfs * qgs;
        }
        total += grid.weights[i] * row;
    }
    return total;
}

double c0_functional(const RadialGrid& grid, const Eigen::VectorXd& f) {
    const int n = grid.size();
    if (f.size() != n)
        throw DimensionError("c0_functional: vector length != grid size");
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += grid.weights[i] * f[i] * phi0(grid.nodes[i]);
    return s;
}

Projection project_P(const RadialGrid& grid, const Eigen::VectorXd& f) {
    Projection p;
    p.c0 = c0_functional(grid, f);
    p.pf.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) p.pf[i] = p.c0 * phi0(grid.nodes[i]);
    return p;
}

SymmetrizedForm symmetrize(const DiscreteOperator& op, bool include_rank_one) {
    const int n = op.size();
    for (int i = 0; i < n; ++i)
        if (!(op.gamma_vec[i] > 0.0))
            throw NumericalError("symmetrize: non-positive Gamma at node " +
                                 std::to_string(i));
    SymmetrizedForm sym;
    sym.alpha_vec = op.gamma_vec.cwiseSqrt();
    sym.sqrt_w = op.sqrt_w;
    sym.rank_one_included = include_rank_one;
    sym.matrix.resize(n, n);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(n);
    if (include_rank_one)
        proj = op.phi0_nodes.cwiseQuotient(sym.alpha_vec).cwiseProduct(op.sqrt_w);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = -2.0 * op.kernel_mat(i, j) * op.sqrt_w[i] * op.sqrt_w[j] /
                       (sym.alpha_vec[i] * sym.alpha_vec[j]);
            if (include_rank_one) v += proj[i] * proj[j];
            if (i == j) v += 1.0;
            sym.matrix(i, j) = v;
            sym.matrix(j, i) = v;
        }
    }
    return sym;
}

SpectralGap spectral_gap(const SymmetrizedForm& sym, double eig_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.matrix);
    if (solver.info() != Eigen::Success)
        throw NumericalError("spectral_gap: eigensolver failed");
    SpectralGap gap;
    const auto& vals = solver.eigenvalues();
    gap.c_star = vals[0];
    const int head = std::min<int>(10, vals.size());
    gap.spectrum_head.assign(vals.data(), vals.data() + head);
    // Report the ground vector in nodal coordinates (divide out sqrt(w)).
    gap.groundvec = solver.eigenvectors().col(0).cwiseQuotient(sym.sqrt_w);
    int imax;
    gap.groundvec.cwiseAbs().maxCoeff(&imax);
    if (gap.groundvec[imax] < 0.0) gap.groundvec = -gap.groundvec;
    gap.groundvec /= gap.groundvec.norm();
    gap.gap_warning = (gap.c_star <= eig_tol);
    return gap;
}

}  // namespace phkin
