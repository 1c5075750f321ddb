#include "phkin/grid.hpp"

#include <cmath>

#include "phkin/kernels.hpp"
#include "phkin/quadrature.hpp"

namespace phkin {

double RadialGrid::normalization_defect() const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) {
        double p = phi0(nodes[i]);
        s += weights[i] * p * p;
    }
    return s - 1.0;
}

RadialGrid build_grid(const GridSpec& spec) {
    if (spec.n < 8) throw InvalidSpecError("build_grid: N must be >= 8");
    if (!(0.0 < spec.k_min && spec.k_min < spec.k_max) ||
        !std::isfinite(spec.k_max))
        throw InvalidSpecError("build_grid: need 0 < k_min < k_max < inf");
    if (!(spec.panel_growth > 0.0) || !std::isfinite(spec.panel_growth))
        throw InvalidSpecError("build_grid: panel_growth must be > 0");
    if (spec.n_panels < 0)
        throw InvalidSpecError("build_grid: n_panels must be >= 0");

    const int panels =
        spec.n_panels > 0 ? spec.n_panels : std::max(1, spec.n / 8);
    if (panels > spec.n)
        throw InvalidSpecError("build_grid: more panels than nodes");

    // Geometric panel widths: h_j = h0 * g^j with sum h_j = k_max - k_min.
    const double span = spec.k_max - spec.k_min;
    const double g = spec.panel_growth;
    double h0;
    if (std::abs(g - 1.0) < 1e-12) {
        h0 = span / panels;
    } else {
        h0 = span * (g - 1.0) / (std::pow(g, panels) - 1.0);
    }

    RadialGrid grid;
    grid.k_min = spec.k_min;
    grid.k_max = spec.k_max;
    grid.nodes.reserve(spec.n);
    grid.weights.reserve(spec.n);

    const int base = spec.n / panels;
    const int extra = spec.n % panels;
    double lo = spec.k_min;
    double width = h0;
    for (int p = 0; p < panels; ++p) {
        double hi = (p + 1 == panels) ? spec.k_max : lo + width;
        const int q = base + (p < extra ? 1 : 0);
        const GaussRule& rule = gauss_legendre(q);
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int j = 0; j < q; ++j) {
            grid.nodes.push_back(c + h * rule.nodes[j]);
            grid.weights.push_back(h * rule.weights[j]);
        }
        lo = hi;
        width *= g;
    }

    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i)
        if (!(grid.nodes[i] < grid.nodes[i + 1]))
            throw NumericalError("build_grid: nodes failed to increase");

    double defect = grid.normalization_defect();
    if (!(std::abs(defect) <= spec.grid_tol))
        throw GridError("build_grid: discrete phi0 normalization defect " +
                        std::to_string(defect) + " exceeds grid_tol");
    return grid;
}

}  // namespace phkin
