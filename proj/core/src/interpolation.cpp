#include "phkin/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace phkin {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw InvalidSpecError("MonotoneCubic: need >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i] < x_[i + 1]))
            throw InvalidSpecError("MonotoneCubic: nodes must increase");

    std::vector<double> d(n - 1), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    slope_[0] = d[0];
    slope_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            slope_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // Fritsch-Carlson limiter at the ends.
    for (std::size_t i : {std::size_t(0), n - 1}) {
        std::size_t j = (i == 0) ? 0 : n - 2;
        if (d[j] == 0.0)
            slope_[i] = 0.0;
        else if (slope_[i] / d[j] > 3.0)
            slope_[i] = 3.0 * d[j];
    }
}

double MonotoneCubic::operator()(double x) const {
    if (!std::isfinite(x)) throw DomainError("MonotoneCubic: non-finite input");
    if (x < x_.front() || x > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i =
        std::min<std::size_t>(x_.size() - 2, std::max<std::ptrdiff_t>(0, it - x_.begin() - 1));
    double h = x_[i + 1] - x_[i];
    double s = (x - x_[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * y_[i] + h * h10 * slope_[i] + h01 * y_[i + 1] +
           h * h11 * slope_[i + 1];
}

}  // namespace phkin
