#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "lsero/exact_sum.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/raster.hpp"
#include "oracles.hpp"

using namespace lsero;

namespace {

GridHeader header(std::size_t ncols, std::size_t nrows, double cellsize = 5.0) {
    GridHeader h;
    h.ncols = ncols;
    h.nrows = nrows;
    h.cellsize = cellsize;
    return h;
}

std::filesystem::path tmp_dir() {
    auto d = std::filesystem::path(LSERO_TEST_TMP) / "raster";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST(GridHeader, CellAreas) {
    const auto h = header(3, 2, 5.0);
    EXPECT_EQ(h.size(), 6u);
    EXPECT_DOUBLE_EQ(h.cell_area_m2(), 25.0);
    EXPECT_DOUBLE_EQ(h.cell_area_ha(), 0.0025);
    EXPECT_DOUBLE_EQ(h.cell_area_km2(), 2.5e-5);
}

TEST(GridHeader, RejectsDegenerateShapes) {
    EXPECT_THROW(Raster(header(0, 2)), InvariantError);
    EXPECT_THROW(Raster(header(2, 0)), InvariantError);
    EXPECT_THROW(Raster(header(2, 2, 0.0)), InvariantError);
    EXPECT_THROW(Raster(header(2, 2, -1.0)), InvariantError);
}

TEST(Raster, StorageMustMatchHeader) {
    EXPECT_THROW(Raster(header(2, 2), std::vector<double>(3), std::vector<std::uint8_t>(4)), ShapeError);
    EXPECT_THROW(Raster(header(2, 2), std::vector<double>(4), std::vector<std::uint8_t>(5)), ShapeError);
}

TEST(ReadGrid, OneNodataCellLeavesThreeValid) {
    const auto r = parse_grid("NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nNODATA_VALUE -9999\n"
                              "1 2\n-9999 4\n");
    EXPECT_EQ(r.valid_count(), 3u);
    EXPECT_FALSE(r.valid(1, 0));
    EXPECT_EQ(r(0, 1), 2.0);
    EXPECT_EQ(r(1, 1), 4.0);
}

TEST(ReadGrid, KeysAreCaseInsensitiveAndUnordered) {
    const auto r = parse_grid("cellsize 2.5\nNrows 1\nncols 3\nnodata_value -1\nyllcorner 10\nXLLCORNER 20\n1 2 3\n");
    EXPECT_EQ(r.cols(), 3u);
    EXPECT_EQ(r.rows(), 1u);
    EXPECT_EQ(r.header().cellsize, 2.5);
    EXPECT_EQ(r.header().xllcorner, 20.0);
    EXPECT_EQ(r.header().yllcorner, 10.0);
}

TEST(ReadGrid, RowsMayWrapAcrossLines) {
    const auto r = parse_grid("NCOLS 3\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 1\nNODATA_VALUE -9999\n"
                              "1 2\n3 4\n5 6\n");
    EXPECT_EQ(r(1, 0), 4.0);
    EXPECT_EQ(r(1, 2), 6.0);
}

TEST(ReadGrid, ZeroColumnsIsAnError) {
    EXPECT_THROW(parse_grid("NCOLS 0\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nNODATA_VALUE -9999\n"),
                 ParseError);
}

TEST(ReadGrid, ErrorsNameLineAndColumn) {
    const std::string base = "NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nNODATA_VALUE -9999\n";
    try {
        parse_grid(base + "1 2\n3 x4\n", "dem.asc");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("dem.asc"), std::string::npos) << msg;
        EXPECT_NE(msg.find("8"), std::string::npos) << msg;
        EXPECT_NE(msg.find("x4"), std::string::npos) << msg;
    }
    EXPECT_THROW(parse_grid(base + "1 2 3\n"), ParseError);
    EXPECT_THROW(parse_grid(base + "1 2 3 4 5\n"), ParseError);
    EXPECT_THROW(parse_grid("NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nBOGUS 1\n1 2 3 4\n"), ParseError);
    EXPECT_THROW(parse_grid("NCOLS 2\nNCOLS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nNODATA_VALUE 1\n1 2 3 4\n"),
                 ParseError);
    EXPECT_THROW(parse_grid("NCOLS 2.5\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\nNODATA_VALUE 1\n1 2 3 4\n"),
                 ParseError);
    EXPECT_THROW(parse_grid("NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 0\nNODATA_VALUE 1\n1 2 3 4\n"),
                 ParseError);
}

TEST(WriteGrid, ConstantOnesAreWrittenAsOnePointZero) {
    const Raster r(header(3, 2), 1.0);
    const std::string text = format_grid(r);
    EXPECT_NE(text.find("\n1.0 1.0 1.0\n1.0 1.0 1.0\n"), std::string::npos) << text;
}

TEST(WriteGrid, MaskedCellWritesNodataToken) {
    Raster r(header(2, 1), 3.0);
    r.invalidate(1);
    const std::string text = format_grid(r);
    EXPECT_NE(text.find("NODATA_VALUE -9999.0\n3.0 -9999.0\n"), std::string::npos) << text;
}

TEST(WriteGrid, CanonicalFileRoundTripsByteForByte) {
    const std::string canonical =
        "NCOLS 3\nNROWS 2\nXLLCORNER 500000.0\nYLLCORNER 4550000.5\nCELLSIZE 5.0\nNODATA_VALUE -9999.0\n"
        "1.0 0.1 -9999.0\n123.456 1e-07 2.5e+20\n";
    const auto path = tmp_dir() / "canonical.asc";
    const Raster r = parse_grid(canonical);
    write_grid(r, path);
    EXPECT_EQ(oracle::slurp(path), canonical);
    EXPECT_EQ(format_grid(read_grid(path)), canonical);
}

TEST(WriteGrid, ValuesRoundTripExactly) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    Raster r(header(17, 9, 2.5), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.set(i, u(gen) * std::pow(10.0, static_cast<double>(i % 7) - 3.0));
    }
    r.invalidate(5);
    const auto path = tmp_dir() / "random.asc";
    write_grid(r, path);
    const Raster back = read_grid(path);
    EXPECT_EQ(back.header(), r.header());
    EXPECT_TRUE(same_values(back, r));
}

TEST(WriteGrid, ValidCellEqualToNodataIsRejected) {
    Raster r(header(2, 1), 1.0);
    r(0, 0) = -9999.0;
    EXPECT_THROW(write_grid(r, tmp_dir() / "bad.asc"), InvariantError);
}

TEST(Map2, MultiplyByOnesIsIdentity) {
    Raster r(header(4, 3), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.set(i, 0.37 * static_cast<double>(i) - 1.0);
    }
    r.invalidate(2);
    const Raster ones(r.header(), 1.0);
    EXPECT_TRUE(same_values(map2(r, ones, [](double x, double y) { return x * y; }), r));
}

TEST(Map2, SelfSubtractionIsZeroOnValidCells) {
    Raster r(header(4, 3), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.set(i, std::sqrt(static_cast<double>(i)));
    }
    r.invalidate(7);
    const Raster d = map2(r, r, [](double x, double y) { return x - y; });
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i == 7) {
            EXPECT_FALSE(d.valid(i));
        } else {
            EXPECT_EQ(d.value(i), 0.0);
        }
    }
}

TEST(Map2, InvalidOnEitherSidePropagates) {
    Raster a(header(3, 1), 1.0);
    Raster b(header(3, 1), 2.0);
    a.invalidate(0);
    b.invalidate(2);
    const Raster s = map2(a, b, [](double x, double y) { return x + y; });
    EXPECT_FALSE(s.valid(0));
    EXPECT_TRUE(s.valid(1));
    EXPECT_FALSE(s.valid(2));
    EXPECT_EQ(s.value(1), 3.0);
}

TEST(Map2, HeaderMismatchIsAShapeError) {
    const Raster a(header(3, 2), 1.0);
    const Raster b(header(2, 3), 1.0);
    EXPECT_THROW(map2(a, b, [](double x, double y) { return x + y; }), ShapeError);
    GridHeader shifted = a.header();
    shifted.xllcorner = 1.0;
    EXPECT_THROW(map2(a, Raster(shifted, 1.0), [](double x, double y) { return x + y; }), ShapeError);
}

TEST(Total, UniformRateOnHundredCells) {
    const Raster r(header(10, 10, 5.0), 2.0);
    EXPECT_DOUBLE_EQ(total(r, 0.0025), 0.5);
    EXPECT_DOUBLE_EQ(total(r), 0.5);
}

TEST(Total, AllMaskedIsZero) {
    Raster r(header(3, 3), 4.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.invalidate(i);
    }
    EXPECT_EQ(total(r), 0.0);
}

TEST(Total, SingleValidCell) {
    Raster r(header(3, 3, 5.0), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.invalidate(i);
    }
    r.set(4, 7.25);
    EXPECT_EQ(total(r, 0.0025), 7.25 * 0.0025);
}

TEST(Total, NegativeValueIsAnInvariantError) {
    Raster r(header(2, 2), 1.0);
    r.set(3, -0.5);
    EXPECT_THROW(total(r), InvariantError);
    EXPECT_THROW(total(Raster(header(2, 2), 1.0), 0.0), DomainError);
}

TEST(Total, IndependentOfSummationOrder) {
    std::mt19937_64 gen(5);
    std::lognormal_distribution<double> ln(0.0, 4.0);
    std::vector<double> v(5000);
    for (auto& x : v) {
        x = ln(gen);
    }
    ExactSum fwd;
    for (double x : v) {
        fwd.add(x);
    }
    std::shuffle(v.begin(), v.end(), gen);
    ExactSum shuffled;
    for (double x : v) {
        shuffled.add(x);
    }
    EXPECT_EQ(fwd.value(), shuffled.value());
}

TEST(ExactSum, CorrectlyRoundedOnCancellation) {
    ExactSum s;
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    EXPECT_EQ(s.value(), 1.0);
    ExactSum t;
    for (int i = 0; i < 10; ++i) {
        t.add(0.1);
    }
    EXPECT_EQ(t.value(), 1.0);
    // exact sum 1 + 2^-53 + 2^-106 rounds up to 1 + 2^-52
    ExactSum h;
    h.add(1.0);
    h.add(std::ldexp(1.0, -53));
    h.add(std::ldexp(1.0, -106));
    EXPECT_EQ(h.value(), 1.0 + std::ldexp(1.0, -52));
}

TEST(FormatShortest, RoundTripsAndMarksIntegers) {
    EXPECT_EQ(format_shortest(1.0), "1.0");
    EXPECT_EQ(format_shortest(-9999.0), "-9999.0");
    EXPECT_EQ(format_shortest(0.1), "0.1");
    EXPECT_EQ(format_shortest(500000.0), "500000.0");
    EXPECT_EQ(format_shortest(2.5e-5), "2.5e-05");
    const double x = 0.30000000000000004;
    double back = 0.0;
    ASSERT_TRUE(detail::parse_double(format_shortest(x), back));
    EXPECT_EQ(back, x);
}
