#include "phkin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace phkin {

namespace {

// Gauss-Kronrod (7,15) pair on [-1,1]; QUADPACK values.
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kKronrodNodes[j]);
        fv[14 - j] = f(c + h * kKronrodNodes[j]);
    }
    fv[7] = f(c);
    double kronrod = 0.0, gauss = 0.0, abs_sum = 0.0;
    for (int j = 0; j < 7; ++j) {
        kronrod += kKronrodWeights[j] * (fv[j] + fv[14 - j]);
        abs_sum += kKronrodWeights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    }
    kronrod += kKronrodWeights[7] * fv[7];
    abs_sum += kKronrodWeights[7] * std::abs(fv[7]);
    // Embedded 7-point Gauss uses the odd Kronrod abscissae.
    for (int j = 0; j < 3; ++j)
        gauss += kGaussWeights[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
    gauss += kGaussWeights[3] * fv[7];

    double value = h * kronrod;
    double diff = std::abs(h * (kronrod - gauss));
    // QUADPACK-style sharpened error estimate.
    double scale = h * abs_sum;
    double err = diff;
    if (scale > 0.0 && diff > 0.0) {
        double r = std::pow(200.0 * diff / scale, 1.5);
        err = (r < 1.0) ? scale * r : diff;
    }
    return {value, err};
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
        throw InvalidSpecError("QuadratureConfig: abs_tol must be > 0");
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
        throw InvalidSpecError("QuadratureConfig: rel_tol must be > 0");
    if (!(tail_cutoff > 0.0) || !std::isfinite(tail_cutoff))
        throw InvalidSpecError("QuadratureConfig: tail_cutoff must be > 0");
    if (max_panels < 1)
        throw InvalidSpecError("QuadratureConfig: max_panels must be >= 1");
    // Certify the truncation: integrands dominated by (2k^2 e^{-k})^2 past
    // tail_cutoff must lose no more than abs_tol.
    double tail = 4.0 * tail_poly_exp(tail_cutoff, 4);
    if (!(tail <= abs_tol))
        throw InvalidSpecError(
            "QuadratureConfig: tail_cutoff too small for abs_tol (envelope "
            "tail " +
            std::to_string(tail) + ")");
}

double tail_poly_exp(double t, int m) {
    if (t < 0.0 || m < 0) throw DomainError("tail_poly_exp: t >= 0, m >= 0");
    // int_T^inf x^m e^{-2x} dx = e^{-2T} * sum_j c_j T^{m-j},
    // c_0 = 1/2, c_j = (m-j+1) c_{j-1} / 2.
    double c = 0.5;
    double poly = c * std::pow(t, m);
    for (int j = 1; j <= m; ++j) {
        c *= 0.5 * (m - j + 1);
        poly += c * std::pow(t, m - j);
    }
    return std::exp(-2.0 * t) * poly;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
    const double pts[2] = {a, b};
    return integrate(f, std::span<const double>(pts, 2), cfg);
}

double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints,
                 const QuadratureConfig& cfg) {
    if (breakpoints.size() < 2)
        throw InvalidSpecError("integrate: need at least two breakpoints");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw InvalidSpecError("integrate: breakpoints must increase");

    std::vector<Segment> heap;
    heap.reserve(64);
    double total_value = 0.0, total_error = 0.0;
    auto push = [&](double lo, double hi) {
        PanelResult r = gk15(f, lo, hi);
        heap.push_back({lo, hi, r.value, r.error});
        std::push_heap(heap.begin(), heap.end());
        total_value += r.value;
        total_error += r.error;
    };
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        push(breakpoints[i], breakpoints[i + 1]);

    const double span = breakpoints.back() - breakpoints.front();
    while (total_error >
           std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_value))) {
        if (static_cast<int>(heap.size()) >= cfg.max_panels)
            throw QuadratureError(
                "integrate: tolerance not met within max_panels (err=" +
                std::to_string(total_error) + ")");
        std::pop_heap(heap.begin(), heap.end());
        Segment worst = heap.back();
        heap.pop_back();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b) ||
            (worst.b - worst.a) < 1e-15 * span)
            throw QuadratureError("integrate: panel subdivision stagnated");
        total_value -= worst.value;
        total_error -= worst.error;
        push(worst.a, mid);
        push(mid, worst.b);
    }
    // Compensated re-sum in ascending panel order for reproducibility.
    std::sort(heap.begin(), heap.end(),
              [](const Segment& x, const Segment& y) { return x.a < y.a; });
    double sum = 0.0, comp = 0.0;
    for (const Segment& s : heap) {
        double y = s.value - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 128) throw InvalidSpecError("gauss_legendre: n in [1,128]");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    auto [pos, inserted] = cache.emplace(n, std::move(rule));
    return pos->second;
}

}  // namespace phkin
