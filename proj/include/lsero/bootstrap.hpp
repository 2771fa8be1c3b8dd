#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsero/error.hpp"
#include "lsero/exact_sum.hpp"
#include "lsero/rng.hpp"
#include "lsero/stats.hpp"

namespace lsero {

enum class Statistic { mean, median, total };

inline Statistic parse_statistic(const std::string& s) {
    if (s == "mean") {
        return Statistic::mean;
    }
    if (s == "median") {
        return Statistic::median;
    }
    if (s == "total") {
        return Statistic::total;
    }
    throw ConfigError("unknown bootstrap statistic '" + s + "' (expected mean, median or total)");
}

inline const char* to_string(Statistic s) {
    switch (s) {
        case Statistic::mean:
            return "mean";
        case Statistic::median:
            return "median";
        case Statistic::total:
            return "total";
    }
    return "?";
}

inline double evaluate(Statistic s, std::span<const double> xs) {
    switch (s) {
        case Statistic::mean:
            return mean(xs);
        case Statistic::median:
            return median(xs);
        case Statistic::total:
            return exact_sum(xs);
    }
    return 0.0;
}

inline constexpr std::array<double, 5> kQuantileLevels = {0.05, 0.25, 0.50, 0.75, 0.95};

/// Nearest-rank quantiles of a bootstrapped statistic.
struct BootstrapTable {
    std::string name;
    Statistic statistic = Statistic::median;
    std::array<double, 5> quantiles{};  // at kQuantileLevels

    /// Lower bound at bootstrap p <= 0.05.
    double lower_bound() const noexcept { return quantiles[0]; }
};

/// n_resamples resamples with replacement of size |values|; resample r draws
/// its indices from substream (seed, r), so tables built from different
/// columns with one seed are paired.
inline BootstrapTable bootstrap(std::span<const double> values, Statistic statistic, std::uint64_t n_resamples,
                                std::uint64_t seed, std::string name = {}) {
    if (values.empty()) {
        throw DomainError("bootstrap of an empty sample");
    }
    if (n_resamples < 1) {
        throw DomainError("bootstrap needs at least one resample");
    }
    const std::size_t n = values.size();
    std::vector<double> stats(n_resamples);
    std::vector<double> sample(n);
    for (std::uint64_t r = 0; r < n_resamples; ++r) {
        Stream rng = Stream::derive(seed, StreamTag::bootstrap, {r});
        for (std::size_t i = 0; i < n; ++i) {
            sample[i] = values[rng.below(n)];
        }
        stats[r] = evaluate(statistic, sample);
    }
    std::sort(stats.begin(), stats.end());
    BootstrapTable t;
    t.name = std::move(name);
    t.statistic = statistic;
    for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) {
        t.quantiles[q] = nearest_rank(stats, kQuantileLevels[q]);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Frequency density

struct DensityBins {
    std::vector<double> edges;         // km^2, log-spaced
    std::vector<std::uint64_t> count;  // per bin
    std::vector<double> density;       // km^-2
    std::vector<double> env_lo;        // optional bootstrap envelope (5%)
    std::vector<double> env_hi;        // optional bootstrap envelope (95%)

    std::size_t bins() const noexcept { return count.size(); }
    double width(std::size_t h) const noexcept { return edges[h + 1] - edges[h]; }
};

/// Log-spaced edges 10^(e/bins_per_decade) covering [lo, hi].
inline std::vector<double> log_edges(double lo, double hi, int bins_per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || bins_per_decade < 1) {
        throw DomainError("log_edges needs 0 < lo <= hi and bins_per_decade >= 1");
    }
    const auto edge = [bins_per_decade](long e) { return std::pow(10.0, static_cast<double>(e) / bins_per_decade); };
    long e0 = static_cast<long>(std::floor(std::log10(lo) * bins_per_decade));
    long e1 = static_cast<long>(std::floor(std::log10(hi) * bins_per_decade)) + 1;
    // log10 rounding may leave lo or hi just outside
    while (edge(e0) > lo) {
        --e0;
    }
    while (edge(e1) <= hi) {
        ++e1;
    }
    std::vector<double> edges;
    for (long e = e0; e <= e1; ++e) {
        edges.push_back(edge(e));
    }
    return edges;
}

namespace detail {

inline void bin_counts(std::span<const double> areas, std::span<const double> edges, std::vector<std::uint64_t>& count) {
    count.assign(edges.size() - 1, 0);
    for (double a : areas) {
        if (a < edges.front() || a >= edges.back()) {
            continue;
        }
        const auto it = std::upper_bound(edges.begin(), edges.end(), a);
        ++count[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
}

}  // namespace detail

/// density(h) = count(h) / (n_total * width(h)) on the given edges.
inline DensityBins density_bins(std::span<const double> areas, std::uint64_t n_total, std::vector<double> edges) {
    if (n_total < 1) {
        throw DomainError("n_total must be positive");
    }
    for (double a : areas) {
        if (!(a > 0.0)) {
            throw DomainError("landslide areas must be positive");
        }
    }
    if (edges.size() < 2) {
        throw DomainError("need at least one bin");
    }
    DensityBins out;
    out.edges = std::move(edges);
    detail::bin_counts(areas, out.edges, out.count);
    out.density.resize(out.count.size());
    for (std::size_t h = 0; h < out.count.size(); ++h) {
        out.density[h] = static_cast<double>(out.count[h]) / (static_cast<double>(n_total) * out.width(h));
    }
    return out;
}

/// Log-spaced bins spanning the sample.
inline DensityBins density_bins(std::span<const double> areas, std::uint64_t n_total, int bins_per_decade) {
    if (areas.empty()) {
        throw DomainError("density of an empty sample");
    }
    const auto [lo, hi] = std::minmax_element(areas.begin(), areas.end());
    if (!(*lo > 0.0)) {
        throw DomainError("landslide areas must be positive");
    }
    return density_bins(areas, n_total, log_edges(*lo, *hi, bins_per_decade));
}

/// Adds per-bin 5%-95% envelopes from bootstrap resamples of the area sample.
inline void add_bootstrap_envelope(DensityBins& bins, std::span<const double> areas, std::uint64_t n_total,
                                   std::uint64_t n_resamples, std::uint64_t seed) {
    if (areas.empty() || n_resamples < 1) {
        throw DomainError("bootstrap envelope needs a sample and at least one resample");
    }
    const std::size_t nb = bins.bins();
    std::vector<std::vector<double>> per_bin(nb, std::vector<double>(n_resamples));
    std::vector<double> sample(areas.size());
    std::vector<std::uint64_t> count;
    for (std::uint64_t r = 0; r < n_resamples; ++r) {
        Stream rng = Stream::derive(seed, StreamTag::density_bootstrap, {r});
        for (double& a : sample) {
            a = areas[rng.below(areas.size())];
        }
        detail::bin_counts(sample, bins.edges, count);
        for (std::size_t h = 0; h < nb; ++h) {
            per_bin[h][r] = static_cast<double>(count[h]) / (static_cast<double>(n_total) * bins.width(h));
        }
    }
    bins.env_lo.resize(nb);
    bins.env_hi.resize(nb);
    for (std::size_t h = 0; h < nb; ++h) {
        std::sort(per_bin[h].begin(), per_bin[h].end());
        bins.env_lo[h] = nearest_rank(per_bin[h], 0.05);
        bins.env_hi[h] = nearest_rank(per_bin[h], 0.95);
    }
}

}  // namespace lsero
