#ifndef PHKIN_INTERPOLATION_HPP
#define PHKIN_INTERPOLATION_HPP

#include <vector>

#include "phkin/common.hpp"

namespace phkin {

/// Fritsch-Carlson monotone cubic interpolant on strictly increasing nodes.
/// Evaluation outside [x_front, x_back] returns zero (consistent with the
/// truncation of the wavenumber axis).
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;

private:
    std::vector<double> x_, y_, slope_;
};

}  // namespace phkin

#endif
