#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "phkin/collision_operator.hpp"

using namespace phkin;

namespace {

const QuadratureConfig kCfg;

const RadialGrid& default_grid() {
    static RadialGrid grid = build_grid(GridSpec{});
    return grid;
}

const DiscreteOperator& default_op() {
    static DiscreteOperator op =
        assemble(default_grid(), kCfg, GammaMode::KernelConsistent);
    return op;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    std::uint64_t rng = seed;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = oracle::uniform_pm1(rng);
    return v;
}

double weighted_norm_sq(const RadialGrid& grid, const Eigen::VectorXd& f) {
    double s = 0.0;
    for (int i = 0; i < grid.size(); ++i) s += grid.weights[i] * f[i] * f[i];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("operator");

TEST_CASE("build_grid: invariants, errors, normalization") {
    GridSpec spec;
    spec.n = 200;
    RadialGrid grid = build_grid(spec);
    CHECK(grid.size() == 200);
    CHECK(std::abs(grid.normalization_defect()) <= 1e-6);
    for (int i = 0; i + 1 < grid.size(); ++i) {
        CHECK(grid.nodes[i] < grid.nodes[i + 1]);
        CHECK(grid.weights[i] > 0.0);
    }
    CHECK(grid.nodes.front() > spec.k_min);
    CHECK(grid.nodes.back() < spec.k_max);

    GridSpec bad = spec;
    bad.k_min = 40.0;
    CHECK_THROWS_AS(build_grid(bad), InvalidSpecError);
    bad = spec;
    bad.n = 4;
    CHECK_THROWS_AS(build_grid(bad), InvalidSpecError);
    bad = spec;
    bad.panel_growth = -1.0;
    CHECK_THROWS_AS(build_grid(bad), InvalidSpecError);
}

TEST_CASE("build_grid: refinement sharpens the phi0 normalization") {
    auto defect = [](int n) {
        GridSpec spec;
        spec.n = n;
        spec.n_panels = 16;
        spec.k_min = 1e-4;
        spec.grid_tol = 1.0;
        return std::abs(build_grid(spec).normalization_defect());
    };
    double coarse = defect(64);
    double fine = defect(128);
    CHECK(coarse > 0.0);
    CHECK(fine <= coarse / 4.0);
}

TEST_CASE("assemble: symmetry, nullvector, conservation identities") {
    const DiscreteOperator& op = default_op();
    CHECK(op.kernel_mat == op.kernel_mat.transpose().eval());

    // E_h phi = 0 to round-off in KernelConsistent mode.
    Eigen::VectorXd residual = op.apply(op.phi_nodes);
    double scale = op.gamma_vec.cwiseProduct(op.phi_nodes).cwiseAbs().maxCoeff();
    CHECK(residual.cwiseAbs().maxCoeff() / scale <= 1e-13);

    // e^T E_h f = 0 to round-off for arbitrary f.
    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        Eigen::VectorXd f = random_vector(op.size(), seed);
        double drift = op.energy_weights.dot(op.apply(f));
        double mass = op.energy_weights.cwiseAbs().dot(f.cwiseAbs());
        CHECK(std::abs(drift) <= 1e-13 * mass);
    }

    for (int i = 0; i < op.size(); ++i) CHECK(op.gamma_vec[i] > 0.0);
}

TEST_CASE("assemble: quadrature mode converges onto the nullvector") {
    auto residual_of = [](int n) {
        GridSpec spec;
        spec.n = n;
        spec.n_panels = n / 8;
        spec.panel_growth = 1.0;
        spec.grid_tol = 1e-1;
        RadialGrid grid = build_grid(spec);
        DiscreteOperator op = assemble(grid, kCfg, GammaMode::Quadrature);
        Eigen::VectorXd r = op.apply(op.phi_nodes);
        Eigen::VectorXd gp = op.gamma_vec.cwiseProduct(op.phi_nodes);
        return op.sqrt_w.cwiseProduct(r).norm() /
               op.sqrt_w.cwiseProduct(gp).norm();
    };
    double coarse = residual_of(256);
    double fine = residual_of(512);
    CHECK(fine < 1e-3);
    CHECK(coarse / fine >= 3.5);  // second order per width halving
}

TEST_CASE("assemble: lumped gamma tracks the quadrature values inside") {
    const DiscreteOperator& op = default_op();
    int checked = 0;
    for (int i = 0; i < op.size(); i += 16) {
        double k = op.grid.nodes[i];
        if (k < 0.05 || k > 20.0) continue;
        double exact = collision_frequency(k, kCfg);
        CHECK(std::abs(op.gamma_vec[i] - exact) / exact < 0.01);
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("apply: linearity and dimension checks") {
    const DiscreteOperator& op = default_op();
    CHECK(op.apply(Eigen::VectorXd::Zero(op.size())).norm() == 0.0);
    CHECK_THROWS_AS(op.apply(Eigen::VectorXd::Zero(op.size() + 1)),
                    DimensionError);

    Eigen::VectorXd f = random_vector(op.size(), 21);
    Eigen::VectorXd g = random_vector(op.size(), 22);
    Eigen::VectorXd combined = op.apply(2.5 * f - 0.75 * g);
    Eigen::VectorXd parts = 2.5 * op.apply(f) - 0.75 * op.apply(g);
    CHECK((combined - parts).norm() <= 1e-12 * parts.norm());
}

TEST_CASE("dirichlet form: kernel direction, positivity, Cauchy-Schwarz") {
    const DiscreteOperator& op = default_op();
    for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
        Eigen::VectorXd g = random_vector(op.size(), seed);
        CHECK(std::abs(dirichlet_form(op, op.phi_nodes, g)) <= 1e-12);
    }
    for (std::uint64_t seed = 50; seed < 150; ++seed) {
        Eigen::VectorXd f = random_vector(op.size(), seed);
        CHECK(dirichlet_form(op, f, f) >=
              -1e-10 * weighted_norm_sq(op.grid, f));
    }
    for (std::uint64_t seed = 200; seed < 250; ++seed) {
        Eigen::VectorXd f = random_vector(op.size(), seed);
        Eigen::VectorXd g = random_vector(op.size(), seed + 1000);
        double cross = std::abs(dirichlet_form(op, f, g));
        double budget = 0.5 * dirichlet_form(op, f, f) +
                        0.5 * dirichlet_form(op, g, g) + 1e-10;
        CHECK(cross <= budget);
    }
}

TEST_CASE("triple form agrees with the dirichlet form on smooth pairs") {
    GridSpec spec;
    spec.n = 400;
    spec.k_max = 15.0;
    spec.panel_growth = 1.15;
    RadialGrid grid = build_grid(spec);
    DiscreteOperator op = assemble(grid, kCfg, GammaMode::KernelConsistent);

    Eigen::VectorXd f(grid.size()), g(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double k = grid.nodes[i];
        f[i] = std::exp(-(k - 2.0) * (k - 2.0));
        g[i] = std::exp(-(k - 3.0) * (k - 3.0) / 2.0);
    }
    double direct = dirichlet_form(op, f, g);
    double triple = triple_form(grid, f, g, kCfg);
    CHECK(std::abs(direct - triple) / std::abs(triple) < 1e-3);

    // The form is symmetric in its two routes as well.
    CHECK(triple_form(grid, g, f, kCfg) ==
          doctest::Approx(triple).epsilon(1e-12));
}

TEST_CASE("projection: unit coefficient, orthogonality, idempotence") {
    const RadialGrid& grid = default_grid();
    Eigen::VectorXd phi0_nodes(grid.size());
    for (int i = 0; i < grid.size(); ++i) phi0_nodes[i] = phi0(grid.nodes[i]);

    Projection p = project_P(grid, phi0_nodes);
    CHECK(p.c0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((p.pf - p.c0 * phi0_nodes).norm() == 0.0);

    Eigen::VectorXd f = random_vector(grid.size(), 61);
    Projection pf = project_P(grid, f);
    Eigen::VectorXd orth = f - pf.pf;
    CHECK(std::abs(c0_functional(grid, orth)) <= 1e-12 * f.cwiseAbs().maxCoeff());

    Projection ppf = project_P(grid, pf.pf);
    CHECK((ppf.pf - pf.pf).norm() <= 1e-12 * (1.0 + pf.pf.norm()));
}

TEST_CASE("symmetrize: structure and the algebraic identity") {
    const DiscreteOperator& op = default_op();
    SymmetrizedForm sym = symmetrize(op, true);
    CHECK(sym.matrix == sym.matrix.transpose().eval());

    // Uncorrected form annihilates sqrt(w) alpha phi.
    SymmetrizedForm bare = symmetrize(op, false);
    Eigen::VectorXd ghat =
        op.sqrt_w.cwiseProduct(sym.alpha_vec).cwiseProduct(op.phi_nodes);
    CHECK(std::abs(ghat.dot(bare.matrix * ghat)) <=
          1e-10 * ghat.squaredNorm());

    // <M g, g> = <-E h, h> + c0(h)^2 with h = g / (sqrt(w) alpha).
    for (std::uint64_t seed : {71ull, 72ull, 73ull, 74ull}) {
        Eigen::VectorXd ghat2 = random_vector(op.size(), seed);
        Eigen::VectorXd h =
            ghat2.cwiseQuotient(op.sqrt_w).cwiseQuotient(sym.alpha_vec);
        double lhs = ghat2.dot(sym.matrix * ghat2);
        double c0 = c0_functional(op.grid, h);
        double rhs = dirichlet_form(op, h, h) + c0 * c0;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }

    DiscreteOperator degenerate = op;
    degenerate.gamma_vec[0] = 0.0;
    CHECK_THROWS_AS(symmetrize(degenerate, true), NumericalError);
}

TEST_CASE("spectral gap: positivity, kernel mode, ground vector") {
    const DiscreteOperator& op = default_op();
    SpectralGap gap = spectral_gap(symmetrize(op, true));
    CHECK(gap.c_star > 0.0);
    CHECK_FALSE(gap.gap_warning);
    CHECK(gap.spectrum_head.size() == 10);
    for (double v : gap.spectrum_head) CHECK(v >= -1e-8);

    SpectralGap bare = spectral_gap(symmetrize(op, false));
    CHECK(bare.c_star >= -1e-8);
    CHECK(bare.c_star <= 1e-6);
    CHECK(bare.spectrum_head[1] >= 10.0 * std::abs(bare.c_star));

    Eigen::VectorXd ref =
        op.gamma_vec.cwiseSqrt().cwiseProduct(op.phi_nodes);
    ref /= ref.norm();
    CHECK(std::abs(ref.dot(bare.groundvec)) >= 0.999);
}

TEST_CASE("operator continuity in the weighted norms") {
    const DiscreteOperator& op = default_op();
    double c0 = hs_norm_c0(kCfg).value;
    double bound = 1.0 + 2.0 * c0;
    for (std::uint64_t seed = 300; seed < 350; ++seed) {
        Eigen::VectorXd f = random_vector(op.size(), seed);
        Eigen::VectorXd ef = op.apply(f);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < op.size(); ++i) {
            num += op.grid.weights[i] * ef[i] * ef[i] / op.gamma_vec[i];
            den += op.grid.weights[i] * op.gamma_vec[i] * f[i] * f[i];
        }
        CHECK(std::sqrt(num) <= bound * std::sqrt(den));
    }
}

TEST_SUITE_END();
