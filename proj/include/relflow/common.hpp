#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relflow {

// Thrown on bad user input (configs, CSVs, CLI arguments). Maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a computation goes numerically wrong (non-finite loss or
// velocity). Maps to exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(std::string_view s);
std::string hex64(uint64_t v);

// Standard normal CDF, double precision (erfc based).
double norm_cdf(double z);

// Inverse standard normal CDF, rational approximation with absolute error
// below 1.15e-9 on (0, 1).
double inv_norm_cdf(double p);

// Counter-based splittable generator (SplitMix64). Streams are derived from a
// single root seed plus a label, so every consumer of randomness in the
// project pulls from a named sub-stream of the one CLI seed.
class RngStream {
public:
    RngStream(uint64_t seed, std::string_view label);

    uint64_t next_u64();
    // Uniform in (0, 1), never exactly 0 or 1.
    double next_uniform();
    // Standard normal via inverse CDF (portable across platforms).
    double next_normal();
    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n);

    // Derived child stream; deterministic in (parent seed, parent label, label).
    RngStream split(std::string_view label) const;

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    uint64_t base_;  // remembered derivation key for split()
};

// Number of worker threads to use for data-parallel loops, capped by the
// RELFLOW_THREADS environment variable (default 1: fully sequential).
int worker_threads();

// Deterministic parallel map over [0, n): each index is processed exactly once
// and writes only to its own outputs. Falls back to a plain loop when
// worker_threads() == 1.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace relflow
