#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lsero/exact_sum.hpp"
#include "lsero/synthetic.hpp"
#include "lsero/terrain.hpp"

using namespace lsero;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

GridHeader header(std::size_t ncols, std::size_t nrows, double cellsize = 5.0) {
    GridHeader h;
    h.ncols = ncols;
    h.nrows = nrows;
    h.cellsize = cellsize;
    return h;
}

/// z = z0 + gx * x + gy * y with x east and y north of the grid's south-west corner.
Raster plane(std::size_t ncols, std::size_t nrows, double gx, double gy, double cellsize = 5.0) {
    Raster dem(header(ncols, nrows, cellsize), 0.0);
    for (std::size_t r = 0; r < nrows; ++r) {
        for (std::size_t c = 0; c < ncols; ++c) {
            const double x = (static_cast<double>(c) + 0.5) * cellsize;
            const double y = (static_cast<double>(nrows - 1 - r) + 0.5) * cellsize;
            dem(r, c) = 100.0 + gx * x + gy * y;
        }
    }
    return dem;
}

bool interior(const Raster& r, std::size_t i) {
    const std::size_t row = i / r.cols();
    const std::size_t col = i % r.cols();
    return row > 0 && col > 0 && row + 1 < r.rows() && col + 1 < r.cols();
}

double angle_diff(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace

TEST(SlopeAspect, HorizontalPlaneHasZeroSlope) {
    const Raster dem(header(6, 5), 42.0);
    const auto sa = slope_aspect(dem);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        EXPECT_EQ(sa.slope.value(i), 0.0);
        EXPECT_FALSE(sa.aspect.valid(i));
    }
}

TEST(SlopeAspect, EastwardRisingPlaneFacesWest) {
    const Raster dem = plane(9, 7, std::tan(10.0 * kDeg), 0.0);
    const auto sa = slope_aspect(dem);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        EXPECT_NEAR(sa.slope.value(i), 10.0 * kDeg, 1e-9);
        EXPECT_NEAR(sa.aspect.value(i), std::numbers::pi, 1e-9);
    }
}

TEST(SlopeAspect, NorthwardRisingPlaneFacesSouth) {
    const Raster dem = plane(8, 11, 0.0, std::tan(25.0 * kDeg));
    const auto sa = slope_aspect(dem);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        EXPECT_NEAR(sa.slope.value(i), 25.0 * kDeg, 1e-9);
        EXPECT_NEAR(sa.aspect.value(i), 1.5 * std::numbers::pi, 1e-9);
    }
}

TEST(SlopeAspect, NodataNeighboursFallBackToOneSidedDifferences) {
    Raster dem = plane(7, 7, 0.2, -0.1);
    dem.invalidate(dem.index(3, 4));
    dem.invalidate(dem.index(2, 3));
    const auto sa = slope_aspect(dem);
    const double expected = std::atan(std::hypot(0.2, 0.1));
    for (std::size_t i = 0; i < dem.size(); ++i) {
        if (!dem.valid(i)) {
            EXPECT_FALSE(sa.slope.valid(i));
            continue;
        }
        EXPECT_NEAR(sa.slope.value(i), expected, 1e-9);
    }
}

TEST(SlopeAspect, GridSmallerThanThreeByThreeIsAShapeError) {
    EXPECT_THROW(slope_aspect(Raster(header(2, 5), 1.0)), ShapeError);
    EXPECT_THROW(dinf_directions(Raster(header(5, 2), 1.0)), ShapeError);
}

TEST(DInfinity, EastwardRisingPlaneDrainsWest) {
    const Raster dem = plane(8, 6, 0.3, 0.0);
    const auto f = dinf_directions(dem);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        ASSERT_TRUE(f.flows(i));
        EXPECT_NEAR(f.angle.value(i), std::numbers::pi, 1e-12);
        double west = 0.0;
        for (int k = 0; k < 2; ++k) {
            if (f.split[i].dir[static_cast<std::size_t>(k)] == 4) {
                west += f.split[i].weight[static_cast<std::size_t>(k)];
            }
        }
        EXPECT_EQ(west, 1.0);
    }
}

TEST(DInfinity, SplitsEvenlyMidwayBetweenNeighbours) {
    // downslope azimuth 22.5 degrees: halfway between east and north-east
    const double phi = std::numbers::pi / 8.0;
    const Raster dem = plane(9, 9, -std::cos(phi), -std::sin(phi));
    const auto f = dinf_directions(dem);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        if (!interior(dem, i)) {
            continue;
        }
        const auto& sp = f.split[i];
        ASSERT_TRUE(sp.flows());
        EXPECT_NEAR(sp.weight[0], 0.5, 1e-12);
        EXPECT_NEAR(sp.weight[1], 0.5, 1e-12);
        EXPECT_NE(sp.dir[0], sp.dir[1]);
        EXPECT_TRUE((sp.dir[0] == 0 && sp.dir[1] == 1) || (sp.dir[0] == 1 && sp.dir[1] == 0));
    }
}

TEST(DInfinity, AngleIsExactOnPlanesOfAnyOrientation) {
    for (int k = 0; k < 16; ++k) {
        const double phi = 0.3 + k * std::numbers::pi / 8.0;
        const double g = 0.05 + 0.03 * k;
        const Raster dem = plane(12, 10, -g * std::cos(phi), -g * std::sin(phi), 2.0);
        const auto f = dinf_directions(dem);
        const double expected = std::fmod(phi, 2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < dem.size(); ++i) {
            ASSERT_TRUE(f.angle.valid(i));
            EXPECT_LT(angle_diff(f.angle.value(i), expected), 1e-9) << "phi=" << phi << " cell " << i;
            EXPECT_GE(f.angle.value(i), 0.0);
            EXPECT_LT(f.angle.value(i), 2.0 * std::numbers::pi);
        }
    }
}

TEST(DInfinity, CardinalAndDiagonalPlanesRouteToOneNeighbour) {
    for (int d = 0; d < 8; ++d) {
        const double phi = d * std::numbers::pi / 4.0;
        const Raster dem = plane(7, 7, -std::cos(phi), -std::sin(phi));
        const auto f = dinf_directions(dem);
        const std::size_t i = dem.index(3, 3);
        const auto& sp = f.split[i];
        double w = 0.0;
        for (int k = 0; k < 2; ++k) {
            if (sp.dir[static_cast<std::size_t>(k)] == d) {
                w += sp.weight[static_cast<std::size_t>(k)];
            }
        }
        EXPECT_EQ(w, 1.0) << "direction " << d;
        EXPECT_LT(angle_diff(f.angle.value(i), phi), 1e-12);
    }
}

TEST(DInfinity, CentralPitIsNoFlow) {
    Raster dem(header(7, 7), 0.0);
    for (std::size_t r = 0; r < 7; ++r) {
        for (std::size_t c = 0; c < 7; ++c) {
            const double dr = static_cast<double>(r) - 3.0;
            const double dc = static_cast<double>(c) - 3.0;
            dem(r, c) = dr * dr + dc * dc;
        }
    }
    const auto f = dinf_directions(dem);
    const std::size_t pit = dem.index(3, 3);
    EXPECT_FALSE(f.flows(pit));
    EXPECT_FALSE(f.angle.valid(pit));
    // every neighbour drains into the pit
    for (int d = 0; d < 8; ++d) {
        const std::size_t j = dem.index(static_cast<std::size_t>(3 + kDirRow[static_cast<std::size_t>(d)]),
                                        static_cast<std::size_t>(3 + kDirCol[static_cast<std::size_t>(d)]));
        bool reaches = false;
        for (int k = 0; k < 2; ++k) {
            reaches = reaches || (f.target(j, k) == pit && f.split[j].weight[static_cast<std::size_t>(k)] > 0.0);
        }
        EXPECT_TRUE(reaches) << "neighbour " << d;
    }
}

TEST(DInfinity, FlatIsNoFlow) {
    const auto f = dinf_directions(Raster(header(5, 5), 3.0));
    for (std::size_t i = 0; i < 25; ++i) {
        EXPECT_FALSE(f.flows(i));
    }
}

TEST(DInfinity, WeightsAreConvexCombinations) {
    const auto c = make_synthetic_catchment({.ncols = 160, .nrows = 100});
    const auto f = dinf_directions(c.dem);
    for (std::size_t i = 0; i < c.dem.size(); ++i) {
        if (!f.flows(i)) {
            continue;
        }
        const auto& sp = f.split[i];
        EXPECT_GE(sp.weight[0], 0.0);
        EXPECT_LE(sp.weight[0], 1.0);
        EXPECT_GE(sp.weight[1], 0.0);
        EXPECT_LE(sp.weight[1], 1.0);
        EXPECT_NEAR(sp.weight[0] + sp.weight[1], 1.0, 1e-15);
    }
}

TEST(FlowLength, InLineChainIsArithmeticProgression) {
    // 100-cell columns draining due south
    const Raster dem = plane(3, 100, 0.0, 0.1, 5.0);
    for (auto mode : {FlowLengthMode::longest, FlowLengthMode::mean}) {
        const Raster len = flow_length(dinf_directions(dem), mode);
        for (std::size_t r = 0; r < 100; ++r) {
            for (std::size_t c = 0; c < 3; ++c) {
                EXPECT_EQ(len(r, c), 5.0 * static_cast<double>(r)) << r << "," << c;
            }
        }
    }
}

TEST(FlowLength, HeadwaterRidgeIsZero) {
    // ridge along the middle column, draining east and west
    Raster dem(header(9, 6), 0.0);
    for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t c = 0; c < 9; ++c) {
            dem(r, c) = 50.0 - std::abs(static_cast<double>(c) - 4.0);
        }
    }
    const Raster len = flow_length(dinf_directions(dem));
    for (std::size_t r = 0; r < 6; ++r) {
        // the crest cell ties east/west and sends all of its flow to one side
        EXPECT_EQ(len(r, 4), 0.0);
        EXPECT_EQ(std::min(len(r, 3), len(r, 5)), 0.0);
        EXPECT_EQ(std::max(len(r, 3), len(r, 5)), 5.0);
        EXPECT_EQ(len(r, 0) + len(r, 8), 35.0);
    }
}

TEST(FlowLength, DiagonalChainStepsByCellDiagonal) {
    // plane falling toward the south-east
    const Raster dem = plane(20, 20, -1.0, 1.0, 5.0);
    const Raster len = flow_length(dinf_directions(dem));
    for (std::size_t r = 0; r < 20; ++r) {
        for (std::size_t c = 0; c < 20; ++c) {
            const double steps = static_cast<double>(std::min(r, c));
            EXPECT_NEAR(len(r, c), steps * 5.0 * std::numbers::sqrt2, 1e-9);
        }
    }
}

TEST(FlowLength, NonDecreasingDownstream) {
    const auto c = make_synthetic_catchment({.ncols = 200, .nrows = 120});
    const auto f = dinf_directions(c.dem);
    const Raster len = flow_length(f);
    for (std::size_t i = 0; i < c.dem.size(); ++i) {
        for (int k = 0; k < 2; ++k) {
            const auto j = f.target(i, k);
            if (j && f.split[i].weight[static_cast<std::size_t>(k)] > 0.0) {
                EXPECT_GE(len.value(*j), len.value(i));
            }
        }
    }
}

TEST(FlowLength, CycleIsAnInternalError) {
    FlowField f;
    f.header = header(3, 3);
    f.angle = Raster(f.header, 0.0);
    f.split.assign(9, FlowSplit{});
    f.valid.assign(9, 1);
    f.split[4].dir = {0, -1};  // centre -> east
    f.split[4].weight = {1.0, 0.0};
    f.split[5].dir = {4, -1};  // east -> centre
    f.split[5].weight = {1.0, 0.0};
    EXPECT_THROW(flow_length(f), InternalError);
}

TEST(ContributingArea, OutletsReceiveTheWholeCatchment) {
    auto c = make_synthetic_catchment({.ncols = 150, .nrows = 110});
    // carve a few nodata holes
    for (std::size_t r = 40; r < 45; ++r) {
        for (std::size_t col = 60; col < 70; ++col) {
            c.dem.invalidate(c.dem.index(r, col));
        }
    }
    const auto f = dinf_directions(c.dem);
    const Raster area = contributing_area(f);
    ExactSum outflow;
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < c.dem.size(); ++i) {
        if (!f.valid[i]) {
            continue;
        }
        ++n_valid;
        double kept = 1.0;
        for (int k = 0; k < 2; ++k) {
            if (f.target(i, k)) {
                kept -= f.split[i].weight[static_cast<std::size_t>(k)];
            }
        }
        outflow.add(area.value(i) * kept);
    }
    const double expected = static_cast<double>(n_valid) * c.dem.header().cell_area_m2();
    EXPECT_NEAR(outflow.value(), expected, 1e-9 * expected);
}
