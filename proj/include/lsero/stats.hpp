#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lsero/error.hpp"
#include "lsero/exact_sum.hpp"

namespace lsero {

/// Arithmetic mean, computed as x0 + exact_sum(x - x0) / n so that a constant
/// input returns that constant exactly.
inline double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw DomainError("mean of an empty sample");
    }
    const double x0 = xs.front();
    ExactSum acc;
    for (double x : xs) {
        acc.add(x - x0);
    }
    return x0 + acc.value() / static_cast<double>(xs.size());
}

/// Median; the midpoint of the two central order statistics for even n.
inline double median(std::vector<double> xs) {
    if (xs.empty()) {
        throw DomainError("median of an empty sample");
    }
    const std::size_t n = xs.size();
    const auto mid = xs.begin() + static_cast<long>(n / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    const double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(xs.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

inline double median(std::span<const double> xs) { return median(std::vector<double>(xs.begin(), xs.end())); }

/// Nearest-rank quantile of sorted data: the ceil(p n)-th order statistic.
inline double nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw DomainError("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("quantile level must lie in [0, 1]");
    }
    const double n = static_cast<double>(sorted.size());
    // nudge so that p*n landing on an integer is not pushed up by rounding noise
    auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

}  // namespace lsero
