#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace lsero {

namespace detail {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Purpose tags keep substreams of one seed disjoint.
enum class StreamTag : std::uint64_t {
    landslide = 1,
    landslide_count = 2,
    bootstrap = 3,
    density_bootstrap = 4,
    test = 99,
};

/// Counter-based SplitMix64 stream.
///
/// A stream is keyed by a hash of (master seed, tag, indices...) and yields
/// mix64(key + i * gamma) for the i-th draw, so any iteration or resample can
/// be reproduced in isolation, independent of thread scheduling.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t key) noexcept : key_{key} {}

    static Stream derive(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> path = {}) noexcept {
        std::uint64_t key = detail::mix64(seed ^ 0x6A09E667F3BCC909ULL);
        key = detail::mix64(key + detail::mix64(static_cast<std::uint64_t>(tag) + detail::kGoldenGamma));
        for (std::uint64_t p : path) {
            key = detail::mix64(key + detail::mix64(p + 0x3C6EF372FE94F82BULL));
        }
        return Stream{key};
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n == 0) {
            return 0;
        }
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = (*this)();
            __extension__ using u128 = unsigned __int128;
            const u128 m = static_cast<u128>(x) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    /// Standard normal, Marsaglia polar method (second variate discarded).
    double normal() noexcept {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double q = u * u + v * v;
            if (q > 0.0 && q < 1.0) {
                return u * std::sqrt(-2.0 * std::log(q) / q);
            }
        }
    }

    /// Unit-scale gamma variate (Marsaglia–Tsang; boosted for shape < 1).
    double gamma(double shape) noexcept {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) {
                return d * v;
            }
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
                return d * v;
            }
        }
    }

    /// Poisson count by summing exponential inter-arrival times.
    std::uint64_t poisson(double mean) noexcept {
        std::uint64_t k = 0;
        double t = -std::log(uniform_open());
        while (t < mean) {
            ++k;
            t -= std::log(uniform_open());
        }
        return k;
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace lsero
