#pragma once

#include <cmath>
#include <numbers>

#include "lsero/raster.hpp"
#include "lsero/rusle.hpp"

namespace lsero {

/// A reproducible test catchment: rolling terrain on a tilted plane, uniform
/// land cover (class 1), uniform R and K.
struct SyntheticCatchment {
    Raster dem;
    Raster landcover;
    Raster r;
    Raster k;
    CoverTable cover;
};

struct SyntheticOptions {
    std::size_t ncols = 800;  // 800 x 500 cells of 5 m = 10 km^2
    std::size_t nrows = 500;
    double cellsize = 5.0;
    double r_factor = 700.0;  // MJ mm ha^-1 h^-1 yr^-1
    double k_factor = 0.03;   // t ha h ha^-1 MJ^-1 mm^-1
    double c_factor = 0.2;
};

inline SyntheticCatchment make_synthetic_catchment(const SyntheticOptions& opt = {}) {
    GridHeader h;
    h.ncols = opt.ncols;
    h.nrows = opt.nrows;
    h.xllcorner = 500000.0;
    h.yllcorner = 4550000.0;
    h.cellsize = opt.cellsize;
    h.nodata_value = -9999.0;

    SyntheticCatchment c{Raster(h, 0.0), Raster(h, 1.0), Raster(h, opt.r_factor), Raster(h, opt.k_factor),
                         CoverTable{{1, opt.c_factor}}};
    constexpr double tau = 2.0 * std::numbers::pi;
    for (std::size_t row = 0; row < h.nrows; ++row) {
        // y measured northward from the southern edge, at the cell centre
        const double y = (static_cast<double>(h.nrows - 1 - row) + 0.5) * h.cellsize;
        for (std::size_t col = 0; col < h.ncols; ++col) {
            const double x = (static_cast<double>(col) + 0.5) * h.cellsize;
            const double z = 300.0 + 0.15 * x + 0.04 * y + 25.0 * std::sin(tau * x / 1600.0) * std::cos(tau * y / 1250.0) +
                             10.0 * std::sin(tau * y / 700.0);
            c.dem(row, col) = z;
        }
    }
    return c;
}

}  // namespace lsero
