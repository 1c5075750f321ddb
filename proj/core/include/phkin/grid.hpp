#ifndef PHKIN_GRID_HPP
#define PHKIN_GRID_HPP

#include <vector>

#include "phkin/common.hpp"

namespace phkin {

/// Composite Gauss-Legendre paneling of the truncated wavenumber axis.
/// Panel widths grow geometrically from k_min toward k_max with ratio
/// panel_growth; nodes are distributed as evenly as possible over panels.
struct GridSpec {
    int n = 400;
    double k_min = 1e-3;
    double k_max = 30.0;
    double panel_growth = 1.5;
    int n_panels = 0;             ///< 0 means n/8 (at least 1)
    double grid_tol = 1e-6;       ///< tolerance on the discrete phi0 norm
};

struct RadialGrid {
    std::vector<double> nodes;    ///< strictly increasing, inside (k_min, k_max)
    std::vector<double> weights;  ///< positive quadrature weights
    double k_min = 0.0;
    double k_max = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }

    /// sum_i w_i phi0(k_i)^2 - 1, the discrete normalization defect.
    double normalization_defect() const;
};

RadialGrid build_grid(const GridSpec& spec);

}  // namespace phkin

#endif
