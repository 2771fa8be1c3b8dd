#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lsero/error.hpp"
#include "lsero/raster.hpp"
#include "lsero/rng.hpp"

namespace lsero {

/// Three-parameter inverse-gamma landslide frequency-area distribution:
///
///   p(A) = 1 / (a Gamma(rho)) * (a / (A - s))^(rho + 1) * exp(-a / (A - s)),  A > s
///
/// rho controls the power-law decay of medium and large areas, a (km^2) the
/// position of the peak, s (km^2) the exponential rollover of small areas.
struct InverseGammaParams {
    double rho = 1.4;
    double a = 1.28e-3;   // km^2
    double s = -1.32e-4;  // km^2

    void validate() const {
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw InvariantError("rho must be positive");
        }
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvariantError("a must be positive");
        }
        if (!std::isfinite(s)) {
            throw InvariantError("s must be finite");
        }
        if (!(mode() > 0.0)) {
            throw InvariantError("peak area s + a/(rho+1) must be positive");
        }
    }

    double mode() const noexcept { return s + a / (rho + 1.0); }

    /// Defined only for rho > 1.
    std::optional<double> mean() const noexcept {
        if (rho <= 1.0) {
            return std::nullopt;
        }
        return s + a / (rho - 1.0);
    }
};

inline double pdf(const InverseGammaParams& p, double area) {
    if (!(area > p.s)) {
        throw DomainError("inverse-gamma pdf is defined for area > s");
    }
    const double t = p.a / (area - p.s);
    // log form keeps (a/(A-s))^(rho+1) finite near the cutoff
    const double log_p = (p.rho + 1.0) * std::log(t) - t - std::log(p.a) - std::lgamma(p.rho);
    return std::exp(log_p);
}

/// P(A <= area) = Q(rho, a / (area - s)), the regularized upper incomplete gamma.
inline double cdf(const InverseGammaParams& p, double area) {
    if (!(area > p.s)) {
        throw DomainError("inverse-gamma cdf is defined for area > s");
    }
    if (std::isinf(area)) {
        return 1.0;
    }
    return boost::math::gamma_q(p.rho, p.a / (area - p.s));
}

/// Contiguous class intervals [edges[h], edges[h+1]) in km^2.
class ClassPartition {
public:
    ClassPartition(std::vector<double> edges, const InverseGammaParams& params) : edges_{std::move(edges)} {
        if (edges_.size() < 2) {
            throw DomainError("class partition needs at least two edges");
        }
        if (!(edges_.front() > params.s)) {
            throw DomainError("lowest class edge must exceed s");
        }
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            if (!(edges_[i] > edges_[i - 1])) {
                throw DomainError("class edges must be strictly increasing (edge " + std::to_string(i) + ")");
            }
        }
    }

    /// bins_per_decade log-spaced classes from lo to hi (both snapped to decade grid points).
    static ClassPartition log_spaced(double lo, double hi, int bins_per_decade, const InverseGammaParams& params) {
        if (!(lo > 0.0) || !(hi > lo) || bins_per_decade < 1) {
            throw DomainError("log-spaced partition needs 0 < lo < hi and bins_per_decade >= 1");
        }
        const long e0 = static_cast<long>(std::floor(std::log10(lo) * bins_per_decade + 1e-9));
        const long e1 = static_cast<long>(std::ceil(std::log10(hi) * bins_per_decade - 1e-9));
        std::vector<double> edges;
        for (long e = e0; e <= e1; ++e) {
            edges.push_back(std::pow(10.0, static_cast<double>(e) / bins_per_decade));
        }
        return ClassPartition(std::move(edges), params);
    }

    std::span<const double> edges() const noexcept { return edges_; }
    std::size_t classes() const noexcept { return edges_.size() - 1; }

private:
    std::vector<double> edges_;
};

/// Expected number of landslides per class: n_total * (F(A_{h+1}) - F(A_h)).
inline std::vector<double> class_counts(const InverseGammaParams& params, const ClassPartition& partition,
                                        double n_total) {
    if (!(n_total > 0.0)) {
        throw DomainError("number of landslides must be positive");
    }
    const auto edges = partition.edges();
    std::vector<double> F(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        F[i] = cdf(params, edges[i]);
    }
    std::vector<double> counts(partition.classes());
    for (std::size_t h = 0; h < counts.size(); ++h) {
        counts[h] = n_total * (F[h + 1] - F[h]);
    }
    return counts;
}

/// Accepted range of sampled areas (km^2). Draws outside are redrawn.
struct AreaBounds {
    double min_km2 = -std::numeric_limits<double>::infinity();
    double max_km2 = std::numeric_limits<double>::infinity();
};

/// One exact inverse-gamma draw: A = s + a / G, G ~ Gamma(rho, 1).
inline double sample_area_untruncated(const InverseGammaParams& p, Stream& rng) {
    for (;;) {
        const double g = rng.gamma(p.rho);
        if (g > 0.0) {
            return p.s + p.a / g;
        }
    }
}

/// Exact draw conditioned on bounds.min_km2 <= A <= bounds.max_km2 by rejection.
inline double sample_area(const InverseGammaParams& p, Stream& rng, const AreaBounds& bounds = {}) {
    if (!(bounds.max_km2 >= bounds.min_km2)) {
        throw DomainError("empty area bounds");
    }
    for (;;) {
        const double area = sample_area_untruncated(p, rng);
        if (area >= bounds.min_km2 && area <= bounds.max_km2) {
            return area;
        }
    }
}

/// CDF of the bounded sampler.
inline double truncated_cdf(const InverseGammaParams& p, double area, const AreaBounds& bounds) {
    const double lo = bounds.min_km2 > p.s ? cdf(p, bounds.min_km2) : 0.0;
    const double hi = std::isinf(bounds.max_km2) ? 1.0 : cdf(p, bounds.max_km2);
    if (area < bounds.min_km2) {
        return 0.0;
    }
    if (area >= bounds.max_km2) {
        return 1.0;
    }
    return (cdf(p, area) - lo) / (hi - lo);
}

// ---------------------------------------------------------------------------
// Placement

/// One sampled landslide rasterized onto the grid.
struct LandslideEvent {
    double area_km2 = 0.0;
    std::size_t centroid = 0;
    std::vector<std::size_t> footprint;  // cell indices, nearest-first
    std::vector<double> bare_fraction;   // one per footprint cell
};

/// Cells a landslide may occupy, plus a nearest-first offset table for
/// building disk footprints.
class PlacementDomain {
public:
    /// `eligible` cells are those valid and nonzero in the mask raster.
    explicit PlacementDomain(const Raster& eligible, std::size_t max_footprint_cells = 0)
        : header_{eligible.header()}, mask_(eligible.size(), 0) {
        for (std::size_t i = 0; i < eligible.size(); ++i) {
            if (eligible.valid(i) && eligible.value(i) != 0.0) {
                mask_[i] = 1;
                cells_.push_back(i);
            }
        }
        // Disk of twice the needed radius, so footprints clipped by a grid corner
        // still resolve from the table.
        const double need = static_cast<double>(std::max<std::size_t>(max_footprint_cells, 9));
        long radius = static_cast<long>(std::ceil(2.0 * std::sqrt(need / 3.141592653589793))) + 2;
        const long span = static_cast<long>(std::max(header_.nrows, header_.ncols));
        radius = std::min(radius, span);
        for (long dr = -radius; dr <= radius; ++dr) {
            for (long dc = -radius; dc <= radius; ++dc) {
                const long d2 = dr * dr + dc * dc;
                if (d2 <= radius * radius) {
                    offsets_.push_back(Offset{d2, static_cast<int>(dr), static_cast<int>(dc)});
                }
            }
        }
        std::sort(offsets_.begin(), offsets_.end(), [](const Offset& x, const Offset& y) {
            if (x.d2 != y.d2) {
                return x.d2 < y.d2;
            }
            if (x.dr != y.dr) {
                return x.dr < y.dr;
            }
            return x.dc < y.dc;
        });
    }

    const GridHeader& header() const noexcept { return header_; }
    std::size_t capacity() const noexcept { return cells_.size(); }
    bool eligible(std::size_t i) const noexcept { return mask_[i] != 0; }
    std::span<const std::size_t> cells() const noexcept { return cells_; }

    /// The k eligible cells nearest the centre of `centroid`, ordered by squared
    /// distance and then (row, col).
    void nearest(std::size_t centroid, std::size_t k, std::vector<std::size_t>& out) const {
        out.clear();
        if (k > cells_.size()) {
            throw PlacementError("footprint of " + std::to_string(k) + " cells exceeds the " +
                                 std::to_string(cells_.size()) + " eligible cells");
        }
        const long r0 = static_cast<long>(centroid / header_.ncols);
        const long c0 = static_cast<long>(centroid % header_.ncols);
        const long nr = static_cast<long>(header_.nrows);
        const long nc = static_cast<long>(header_.ncols);
        for (const Offset& o : offsets_) {
            const long r = r0 + o.dr;
            const long c = c0 + o.dc;
            if (r < 0 || c < 0 || r >= nr || c >= nc) {
                continue;
            }
            const std::size_t j = static_cast<std::size_t>(r * nc + c);
            if (mask_[j]) {
                out.push_back(j);
                if (out.size() == k) {
                    return;
                }
            }
        }
        // table exhausted: rank every eligible cell
        struct Ranked {
            long d2;
            std::size_t index;
        };
        std::vector<Ranked> ranked;
        ranked.reserve(cells_.size());
        for (std::size_t j : cells_) {
            const long dr = static_cast<long>(j / header_.ncols) - r0;
            const long dc = static_cast<long>(j % header_.ncols) - c0;
            ranked.push_back(Ranked{dr * dr + dc * dc, j});
        }
        // index order is (row, col) order
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(k), ranked.end(),
                          [](const Ranked& x, const Ranked& y) {
                              return x.d2 != y.d2 ? x.d2 < y.d2 : x.index < y.index;
                          });
        out.clear();
        for (std::size_t i = 0; i < k; ++i) {
            out.push_back(ranked[i].index);
        }
    }

private:
    struct Offset {
        long d2;
        int dr;
        int dc;
    };

    GridHeader header_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::size_t> cells_;
    std::vector<Offset> offsets_;
};

/// Number of cells a landslide of `area_km2` covers (at least one).
inline std::size_t footprint_cells(double area_km2, const GridHeader& h) {
    const double k = std::round(area_km2 / h.cell_area_km2());
    return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

/// Drops a landslide: uniform centroid over eligible cells, discretized-disk
/// footprint, per-cell bare-soil fraction uniform in [bare_min, 1].
inline LandslideEvent place_landslide(double area_km2, const PlacementDomain& domain, Stream& rng,
                                      double bare_min = 0.2) {
    if (!(area_km2 > 0.0)) {
        throw DomainError("landslide area must be positive");
    }
    if (!(bare_min >= 0.0 && bare_min <= 1.0)) {
        throw InvariantError("bare_min must be a proportion");
    }
    const std::size_t k = footprint_cells(area_km2, domain.header());
    if (domain.capacity() == 0 || k > domain.capacity()) {
        throw PlacementError("landslide of " + std::to_string(area_km2) + " km^2 (" + std::to_string(k) +
                             " cells) exceeds the " + std::to_string(domain.capacity()) + " eligible cells");
    }
    LandslideEvent ev;
    ev.area_km2 = area_km2;
    ev.centroid = domain.cells()[rng.below(domain.capacity())];
    domain.nearest(ev.centroid, k, ev.footprint);
    ev.bare_fraction.resize(ev.footprint.size());
    for (double& f : ev.bare_fraction) {
        f = bare_min + (1.0 - bare_min) * rng.uniform();
    }
    return ev;
}

}  // namespace lsero
