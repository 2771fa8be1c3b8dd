#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsero/error.hpp"
#include "lsero/exact_sum.hpp"

namespace lsero {

struct GridHeader {
    std::size_t ncols = 1;
    std::size_t nrows = 1;
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;  // m
    double nodata_value = -9999.0;

    std::size_t size() const noexcept { return ncols * nrows; }
    double cell_area_m2() const noexcept { return cellsize * cellsize; }
    double cell_area_ha() const noexcept { return cellsize * cellsize / 10'000.0; }
    double cell_area_km2() const noexcept { return cellsize * cellsize / 1'000'000.0; }

    void validate() const {
        if (ncols < 1 || nrows < 1) {
            throw InvariantError("grid must have at least one row and one column");
        }
        if (!(cellsize > 0.0) || !std::isfinite(cellsize)) {
            throw InvariantError("cellsize must be a positive finite number");
        }
    }

    /// Same geometry. The nodata token is a file-format detail and is ignored.
    bool same_grid(const GridHeader& o) const noexcept {
        return ncols == o.ncols && nrows == o.nrows && xllcorner == o.xllcorner && yllcorner == o.yllcorner &&
               cellsize == o.cellsize;
    }

    bool operator==(const GridHeader&) const = default;
};

/// Row-major grid of doubles with a validity mask; row 0 is the northern row.
class Raster {
public:
    Raster() = default;

    explicit Raster(GridHeader header, double fill = 0.0)
        : header_{header}, values_(header.size(), fill), mask_(header.size(), 1) {
        header_.validate();
    }

    Raster(GridHeader header, std::vector<double> values, std::vector<std::uint8_t> mask)
        : header_{header}, values_{std::move(values)}, mask_{std::move(mask)} {
        header_.validate();
        if (values_.size() != header_.size() || mask_.size() != header_.size()) {
            throw ShapeError("raster storage does not match " + std::to_string(header_.nrows) + "x" +
                             std::to_string(header_.ncols) + " header");
        }
    }

    const GridHeader& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return header_.nrows; }
    std::size_t cols() const noexcept { return header_.ncols; }
    std::size_t size() const noexcept { return values_.size(); }

    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * header_.ncols + col; }

    double operator()(std::size_t row, std::size_t col) const noexcept { return values_[index(row, col)]; }
    double& operator()(std::size_t row, std::size_t col) noexcept { return values_[index(row, col)]; }

    double value(std::size_t i) const noexcept { return values_[i]; }
    bool valid(std::size_t i) const noexcept { return mask_[i] != 0; }
    bool valid(std::size_t row, std::size_t col) const noexcept { return mask_[index(row, col)] != 0; }

    void set(std::size_t i, double v) noexcept {
        values_[i] = v;
        mask_[i] = 1;
    }
    void invalidate(std::size_t i) noexcept {
        values_[i] = header_.nodata_value;
        mask_[i] = 0;
    }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const std::uint8_t> mask() const noexcept { return mask_; }

    std::size_t valid_count() const noexcept {
        std::size_t n = 0;
        for (auto m : mask_) {
            n += m != 0;
        }
        return n;
    }

    /// Value-wise equality: same grid, same mask, equal values on valid cells.
    friend bool same_values(const Raster& a, const Raster& b) {
        if (!a.header_.same_grid(b.header_) || a.mask_ != b.mask_) {
            return false;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a.valid(i) && a.values_[i] != b.values_[i]) {
                return false;
            }
        }
        return true;
    }

private:
    GridHeader header_{};
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

inline void require_same_grid(const Raster& a, const Raster& b, const std::string& what) {
    if (!a.header().same_grid(b.header())) {
        throw ShapeError(what + ": raster headers differ (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
    }
}

/// Every valid value >= 0.
inline void require_nonnegative(const Raster& r, const std::string& role) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.valid(i) && !(r.value(i) >= 0.0)) {
            throw InvariantError(role + " must be a nonnegative matrix; cell " + std::to_string(i) + " holds " +
                                 std::to_string(r.value(i)));
        }
    }
}

/// Every valid value in [0, 1].
inline void require_proportion(const Raster& r, const std::string& role) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.valid(i) && !(r.value(i) >= 0.0 && r.value(i) <= 1.0)) {
            throw InvariantError(role + " must be a proportion in [0, 1]; cell " + std::to_string(i) + " holds " +
                                 std::to_string(r.value(i)));
        }
    }
}

template <typename F>
Raster map1(const Raster& a, F&& f) {
    Raster out(a.header(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.valid(i)) {
            out.set(i, f(a.value(i)));
        } else {
            out.invalidate(i);
        }
    }
    return out;
}

/// Cellwise f(a, b); invalid wherever either input is invalid.
template <typename F>
Raster map2(const Raster& a, const Raster& b, F&& f) {
    require_same_grid(a, b, "map2");
    Raster out(a.header(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.valid(i) && b.valid(i)) {
            out.set(i, f(a.value(i), b.value(i)));
        } else {
            out.invalidate(i);
        }
    }
    return out;
}

/// Sum of value * cell_area_ha over valid cells (t/yr for a rate in t/ha/yr).
/// Exactly rounded, so independent of any evaluation order.
inline double total(const Raster& r, double cell_area_ha) {
    if (!(cell_area_ha > 0.0)) {
        throw DomainError("cell area must be positive");
    }
    require_nonnegative(r, "erosion rate");
    ExactSum acc;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.valid(i)) {
            acc.add(r.value(i) * cell_area_ha);
        }
    }
    return acc.value();
}

inline double total(const Raster& r) { return total(r, r.header().cell_area_ha()); }

}  // namespace lsero
