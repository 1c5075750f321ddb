#ifndef PHKIN_COMMON_HPP
#define PHKIN_COMMON_HPP

#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phkin {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Scalar argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed grid/solver/quadrature specification.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to meet the requested tolerances.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Vector length does not match the grid.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Grid cannot support the requested operation (mismatch, resolution).
class GridError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: NaN detected, eigensolver failure, overflow,
/// symmetry violation, degenerate inputs.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Run fn(i) for i in [0, n). Work is split into contiguous chunks across
/// hardware threads; fn must only write to index-disjoint state. The first
/// exception thrown by any chunk is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = std::min<std::size_t>(hw == 0 ? 1 : hw, n);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &error_mutex, &error] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace phkin

#endif
