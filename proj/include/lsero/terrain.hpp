#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "lsero/error.hpp"
#include "lsero/raster.hpp"

namespace lsero {

/// Neighbour directions, counter-clockwise from east. Even codes are cardinal,
/// odd codes diagonal; direction k points at angle k * pi/4.
inline constexpr std::array<int, 8> kDirRow = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kDirCol = {1, 1, 0, -1, -1, -1, 0, 1};

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SlopeAspect {
    Raster slope;   // radians, [0, pi/2)
    Raster aspect;  // downslope azimuth, radians CCW from east, [0, 2pi); invalid where slope is 0
};

namespace detail {

inline void require_min_grid(const Raster& dem, const char* what) {
    if (dem.rows() < 3 || dem.cols() < 3) {
        throw ShapeError(std::string(what) + ": grid must be at least 3x3, got " + std::to_string(dem.rows()) + "x" +
                         std::to_string(dem.cols()));
    }
}

inline bool cell_valid(const Raster& r, long row, long col) {
    return row >= 0 && col >= 0 && row < static_cast<long>(r.rows()) && col < static_cast<long>(r.cols()) &&
           r.valid(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
}

/// One Horn row/column difference. Central when both sides exist, one-sided
/// otherwise; exact on planes either way.
inline std::optional<double> difference(const Raster& dem, long r0, long c0, long r1, long c1, long rc, long cc,
                                        double cellsize) {
    const bool lo = cell_valid(dem, r0, c0);
    const bool hi = cell_valid(dem, r1, c1);
    if (lo && hi) {
        return (dem(r1, c1) - dem(r0, c0)) / (2.0 * cellsize);
    }
    if (!cell_valid(dem, rc, cc)) {
        return std::nullopt;
    }
    if (hi) {
        return (dem(r1, c1) - dem(rc, cc)) / cellsize;
    }
    if (lo) {
        return (dem(rc, cc) - dem(r0, c0)) / cellsize;
    }
    return std::nullopt;
}

}  // namespace detail

/// Slope and aspect by Horn's 3x3 weighted finite differences (1-2-1 weights).
///
/// Missing neighbours (grid edge or nodata) fall back to one-sided differences
/// in the affected row or column; a cell with no usable difference in either
/// direction is masked.
inline SlopeAspect slope_aspect(const Raster& dem) {
    detail::require_min_grid(dem, "slope_aspect");
    const double cs = dem.header().cellsize;
    SlopeAspect out{Raster(dem.header(), 0.0), Raster(dem.header(), 0.0)};
    static constexpr double kWeights[3] = {1.0, 2.0, 1.0};

    for (long row = 0; row < static_cast<long>(dem.rows()); ++row) {
        for (long col = 0; col < static_cast<long>(dem.cols()); ++col) {
            const std::size_t i = dem.index(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
            if (!dem.valid(i)) {
                out.slope.invalidate(i);
                out.aspect.invalidate(i);
                continue;
            }
            // dz/dx: east minus west, averaged over rows row-1..row+1
            double sx = 0.0;
            double wx = 0.0;
            // dz/dy: north minus south (north is row - 1), averaged over columns
            double sy = 0.0;
            double wy = 0.0;
            for (int k = -1; k <= 1; ++k) {
                if (auto d = detail::difference(dem, row + k, col - 1, row + k, col + 1, row + k, col, cs)) {
                    sx += kWeights[k + 1] * *d;
                    wx += kWeights[k + 1];
                }
                if (auto d = detail::difference(dem, row + 1, col + k, row - 1, col + k, row, col + k, cs)) {
                    sy += kWeights[k + 1] * *d;
                    wy += kWeights[k + 1];
                }
            }
            if (wx == 0.0 || wy == 0.0) {
                out.slope.invalidate(i);
                out.aspect.invalidate(i);
                continue;
            }
            const double p = sx / wx;
            const double q = sy / wy;
            const double grad = std::hypot(p, q);
            out.slope.set(i, std::atan(grad));
            if (grad == 0.0) {
                out.aspect.invalidate(i);
            } else {
                double az = std::atan2(-q, -p);
                if (az < 0.0) {
                    az += kTwoPi;
                }
                if (az >= kTwoPi) {
                    az -= kTwoPi;
                }
                out.aspect.set(i, az);
            }
        }
    }
    return out;
}

/// Outflow of one cell: up to two neighbour directions with weights summing to 1.
struct FlowSplit {
    std::array<std::int8_t, 2> dir{-1, -1};
    std::array<double, 2> weight{0.0, 0.0};

    bool flows() const noexcept { return dir[0] >= 0; }
};

/// D-infinity flow field.
struct FlowField {
    GridHeader header;
    Raster angle;  // radians CCW from east in [0, 2pi); invalid on no-flow and nodata cells
    std::vector<FlowSplit> split;
    std::vector<std::uint8_t> valid;  // DEM validity

    bool flows(std::size_t i) const noexcept { return split[i].flows(); }

    /// Receiving cell of link k from cell i, or nullopt if the flow leaves the
    /// grid or enters a nodata cell.
    std::optional<std::size_t> target(std::size_t i, int k) const noexcept {
        const int d = split[i].dir[static_cast<std::size_t>(k)];
        if (d < 0) {
            return std::nullopt;
        }
        const long row = static_cast<long>(i / header.ncols) + kDirRow[static_cast<std::size_t>(d)];
        const long col = static_cast<long>(i % header.ncols) + kDirCol[static_cast<std::size_t>(d)];
        if (row < 0 || col < 0 || row >= static_cast<long>(header.nrows) || col >= static_cast<long>(header.ncols)) {
            return std::nullopt;
        }
        const std::size_t j = static_cast<std::size_t>(row) * header.ncols + static_cast<std::size_t>(col);
        if (!valid[j]) {
            return std::nullopt;
        }
        return j;
    }
};

/// Tarboton's D-infinity flow directions.
///
/// Each cell is the apex of eight triangular facets spanned by one cardinal and
/// one adjacent diagonal neighbour. The steepest downslope facet gives the flow
/// angle, and flow is split between the facet's two neighbours in proportion to
/// angular proximity. Neighbours outside the grid or on nodata are linearly
/// extrapolated through the cell from the opposite neighbour (corner diagonals
/// from their two cardinal components), so edge cells drain out of the grid. Cells with no downslope facet (pits, flats) are no-flow.
inline FlowField dinf_directions(const Raster& dem) {
    detail::require_min_grid(dem, "dinf_directions");
    const GridHeader& h = dem.header();
    const double d1 = h.cellsize;
    const double d2 = h.cellsize;
    const double diag = std::hypot(d1, d2);
    const double rmax = std::atan2(d2, d1);
    static constexpr double kSnap = 1e-12;

    FlowField field{h, Raster(h, 0.0), std::vector<FlowSplit>(h.size()), std::vector<std::uint8_t>(h.size(), 0)};

    for (long row = 0; row < static_cast<long>(h.nrows); ++row) {
        for (long col = 0; col < static_cast<long>(h.ncols); ++col) {
            const std::size_t i = dem.index(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
            if (!dem.valid(i)) {
                field.angle.invalidate(i);
                continue;
            }
            field.valid[i] = 1;
            const double e0 = dem.value(i);

            std::array<double, 8> ez{};
            std::array<bool, 8> have{};
            // cardinals first, so a diagonal lacking both itself and its opposite
            // can be extrapolated from its two cardinal components
            for (int d : {0, 2, 4, 6, 1, 3, 5, 7}) {
                const long r = row + kDirRow[static_cast<std::size_t>(d)];
                const long c = col + kDirCol[static_cast<std::size_t>(d)];
                if (detail::cell_valid(dem, r, c)) {
                    ez[static_cast<std::size_t>(d)] = dem(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
                    have[static_cast<std::size_t>(d)] = true;
                } else {
                    const long ro = row - kDirRow[static_cast<std::size_t>(d)];
                    const long co = col - kDirCol[static_cast<std::size_t>(d)];
                    if (detail::cell_valid(dem, ro, co)) {
                        ez[static_cast<std::size_t>(d)] =
                            2.0 * e0 - dem(static_cast<std::size_t>(ro), static_cast<std::size_t>(co));
                        have[static_cast<std::size_t>(d)] = true;
                    } else if (d % 2 == 1) {
                        const auto a = static_cast<std::size_t>(d - 1);
                        const auto b = static_cast<std::size_t>((d + 1) % 8);
                        if (have[a] && have[b]) {
                            ez[static_cast<std::size_t>(d)] = ez[a] + ez[b] - e0;
                            have[static_cast<std::size_t>(d)] = true;
                        }
                    }
                }
            }

            double best_s = 0.0;
            int best_facet = -1;
            double best_r = 0.0;
            for (int f = 0; f < 8; ++f) {
                // facet f spans directions f and f+1; one of them is cardinal
                const int card = (f % 2 == 0) ? f : (f + 1) % 8;
                const int dg = (f % 2 == 0) ? f + 1 : f;
                if (!have[static_cast<std::size_t>(card)] || !have[static_cast<std::size_t>(dg)]) {
                    continue;
                }
                const double e1 = ez[static_cast<std::size_t>(card)];
                const double e2 = ez[static_cast<std::size_t>(dg)];
                const double s1 = (e0 - e1) / d1;
                const double s2 = (e1 - e2) / d2;
                double r = std::atan2(s2, s1);
                double s = std::hypot(s1, s2);
                if (r < 0.0) {
                    r = 0.0;
                    s = s1;
                } else if (r > rmax) {
                    r = rmax;
                    s = (e0 - e2) / diag;
                }
                if (s > best_s) {
                    best_s = s;
                    best_facet = f;
                    best_r = r;
                }
            }

            if (best_facet < 0) {
                field.angle.invalidate(i);
                continue;
            }

            const int f = best_facet;
            const int card = (f % 2 == 0) ? f : (f + 1) % 8;
            const int dg = (f % 2 == 0) ? f + 1 : f;
            double angle = (f % 2 == 0) ? f * kQuarterPi + best_r : (f + 1) * kQuarterPi - best_r;
            if (angle >= kTwoPi) {
                angle -= kTwoPi;
            }
            field.angle.set(i, angle);

            double w_diag = best_r / rmax;
            if (w_diag < kSnap) {
                w_diag = 0.0;
            } else if (w_diag > 1.0 - kSnap) {
                w_diag = 1.0;
            }
            FlowSplit& sp = field.split[i];
            if (w_diag == 0.0) {
                sp.dir = {static_cast<std::int8_t>(card), -1};
                sp.weight = {1.0, 0.0};
            } else if (w_diag == 1.0) {
                sp.dir = {static_cast<std::int8_t>(dg), -1};
                sp.weight = {1.0, 0.0};
            } else {
                sp.dir = {static_cast<std::int8_t>(card), static_cast<std::int8_t>(dg)};
                sp.weight = {1.0 - w_diag, w_diag};
            }
        }
    }
    return field;
}

enum class FlowLengthMode {
    longest,  // longest upstream path over donors with positive flow share
    mean,     // flow-share-weighted mean over donors
};

namespace detail {

/// Kahn topological order over in-grid links. Throws on a cycle.
inline std::vector<std::size_t> topological_order(const FlowField& field) {
    const std::size_t n = field.header.size();
    std::vector<std::uint32_t> indeg(n, 0);
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!field.valid[i]) {
            continue;
        }
        ++n_valid;
        for (int k = 0; k < 2; ++k) {
            if (auto j = field.target(i, k)) {
                ++indeg[*j];
            }
        }
    }
    std::vector<std::size_t> order;
    order.reserve(n_valid);
    std::queue<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (field.valid[i] && indeg[i] == 0) {
            ready.push(i);
        }
    }
    while (!ready.empty()) {
        const std::size_t i = ready.front();
        ready.pop();
        order.push_back(i);
        for (int k = 0; k < 2; ++k) {
            if (auto j = field.target(i, k)) {
                if (--indeg[*j] == 0) {
                    ready.push(*j);
                }
            }
        }
    }
    if (order.size() != n_valid) {
        throw InternalError("cycle detected in D-infinity flow field (" + std::to_string(n_valid - order.size()) +
                            " cells unresolved)");
    }
    return order;
}

inline double step_length(int dir, double cellsize) {
    return (dir % 2 == 0) ? cellsize : cellsize * std::numbers::sqrt2;
}

}  // namespace detail

/// Upslope flow-path length (m) per cell. Headwater cells get 0; each link adds
/// one cellsize (cardinal) or cellsize*sqrt(2) (diagonal).
inline Raster flow_length(const FlowField& field, FlowLengthMode mode = FlowLengthMode::longest) {
    const GridHeader& h = field.header;
    const std::size_t n = h.size();
    const auto order = detail::topological_order(field);
    std::vector<double> len(n, 0.0);
    std::vector<double> num(n, 0.0);
    std::vector<double> den(n, 0.0);

    for (std::size_t i : order) {
        if (mode == FlowLengthMode::mean && den[i] > 0.0) {
            len[i] = num[i] / den[i];
        }
        const FlowSplit& sp = field.split[i];
        for (int k = 0; k < 2; ++k) {
            auto j = field.target(i, k);
            if (!j || sp.weight[static_cast<std::size_t>(k)] <= 0.0) {
                continue;
            }
            const double through = len[i] + detail::step_length(sp.dir[static_cast<std::size_t>(k)], h.cellsize);
            if (mode == FlowLengthMode::longest) {
                len[*j] = std::max(len[*j], through);
            } else {
                num[*j] += sp.weight[static_cast<std::size_t>(k)] * through;
                den[*j] += sp.weight[static_cast<std::size_t>(k)];
            }
        }
    }

    Raster out(h, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (field.valid[i]) {
            out.set(i, len[i]);
        } else {
            out.invalidate(i);
        }
    }
    return out;
}

/// Upslope contributing area (m^2), own cell included.
inline Raster contributing_area(const FlowField& field) {
    const GridHeader& h = field.header;
    const auto order = detail::topological_order(field);
    std::vector<double> area(h.size(), 0.0);
    for (std::size_t i : order) {
        area[i] += h.cell_area_m2();
        for (int k = 0; k < 2; ++k) {
            if (auto j = field.target(i, k)) {
                area[*j] += field.split[i].weight[static_cast<std::size_t>(k)] * area[i];
            }
        }
    }
    Raster out(h, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (field.valid[i]) {
            out.set(i, area[i]);
        } else {
            out.invalidate(i);
        }
    }
    return out;
}

inline FlowLengthMode parse_flow_length_mode(const std::string& s) {
    if (s == "longest") {
        return FlowLengthMode::longest;
    }
    if (s == "mean") {
        return FlowLengthMode::mean;
    }
    throw ConfigError("unknown flow_length_mode '" + s + "' (expected longest or mean)");
}

inline const char* to_string(FlowLengthMode m) { return m == FlowLengthMode::longest ? "longest" : "mean"; }

}  // namespace lsero
