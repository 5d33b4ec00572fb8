#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hopfdirac {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr cplx iunit{0.0, 1.0};

// ---- error types ------------------------------------------------------

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : NumericError {
    using NumericError::NumericError;
};
struct NotPositiveDefinite : NumericError {
    using NumericError::NumericError;
};
struct FluxMismatch : NumericError {
    using NumericError::NumericError;
};
struct QuadratureFailure : NumericError {
    using NumericError::NumericError;
};
struct GridTooCoarse : NumericError {
    using NumericError::NumericError;
};
struct AmbiguousZeroMode : NumericError {
    using NumericError::NumericError;
};
struct DegreeTooLarge : NumericError {
    using NumericError::NumericError;
};
struct IllConditionedGram : NumericError {
    using NumericError::NumericError;
};
struct HypothesisViolation : NumericError {
    using NumericError::NumericError;
};
struct NonConvergentNorm : NumericError {
    using NumericError::NumericError;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- compensated summation --------------------------------------------

class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// ---- portable seeded RNG (splitmix64 + Box-Muller) ---------------------
// rand() streams are reproducible across platforms, unlike
// std::normal_distribution.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in (0,1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform(), v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 2.0 * pi * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---- bounded parallel map ----------------------------------------------
// Each index writes only its own slot, so results are deterministic
// regardless of scheduling. Worker count is capped by HOPF_DIRAC_THREADS
// (0 or unset = hardware concurrency).

std::size_t worker_count();

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errs(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace hopfdirac
