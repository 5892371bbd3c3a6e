#include "relflow/common.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <thread>

namespace relflow {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double inv_norm_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw NumericError("inv_norm_cdf: p must lie strictly inside (0,1)");
    }
    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t derive(uint64_t seed, std::string_view label) {
    uint64_t s = seed ^ 0x6a09e667f3bcc908ull;
    uint64_t mixed = splitmix64(s) ^ fnv1a64(label);
    return splitmix64(mixed);
}

}  // namespace

RngStream::RngStream(uint64_t seed, std::string_view label)
    : state_(derive(seed, label)), base_(state_) {}

uint64_t RngStream::next_u64() {
    return splitmix64(state_);
}

double RngStream::next_uniform() {
    // 53 random bits, offset by half an ulp so the result is never 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
    return inv_norm_cdf(next_uniform());
}

uint64_t RngStream::next_below(uint64_t n) {
    if (n == 0) throw NumericError("next_below: n must be positive");
    // Rejection sampling; unbiased and deterministic given the stream.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

RngStream RngStream::split(std::string_view label) const {
    return RngStream(base_, label);
}

int worker_threads() {
    static int cached = [] {
        int n = 1;
        if (const char* env = std::getenv("RELFLOW_THREADS")) {
            n = std::atoi(env);
        }
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (n < 1) n = 1;
        if (n > hw) n = hw;
        return n;
    }();
    return cached;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int threads = worker_threads();
    if (threads <= 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace relflow
