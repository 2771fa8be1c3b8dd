// Writes the synthetic test catchment and a matching configuration file.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "lsero/lsero.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic catchment (dem, landcover, r, k, cover table, config)"};
    std::string out = "synthetic";
    lsero::SyntheticOptions opt;
    app.add_option("--out", out, "output directory");
    app.add_option("--ncols", opt.ncols, "columns")->check(CLI::Range(3, 100000));
    app.add_option("--nrows", opt.nrows, "rows")->check(CLI::Range(3, 100000));
    app.add_option("--cellsize", opt.cellsize, "cell size (m)")->check(CLI::PositiveNumber);
    app.add_option("--c-factor", opt.c_factor, "uniform C factor")->check(CLI::Range(0.0, 1.0));
    CLI11_PARSE(app, argc, argv);

    try {
        namespace fs = std::filesystem;
        lsero::ensure_out_dir(out);
        const auto c = lsero::make_synthetic_catchment(opt);
        const fs::path dir(out);
        lsero::write_grid(c.dem, dir / "dem.asc");
        lsero::write_grid(c.landcover, dir / "landcover.asc");
        lsero::write_grid(c.r, dir / "r.asc");
        lsero::write_grid(c.k, dir / "k.asc");
        std::string table = "class,c_factor\n";
        for (const auto& [cls, value] : c.cover.entries()) {
            table += std::to_string(cls) + "," + lsero::format_shortest(value) + "\n";
        }
        lsero::detail::write_file(dir / "cover.csv", table);
        lsero::detail::write_file(dir / "config.txt",
                                  "# synthetic catchment\n"
                                  "dem = dem.asc\n"
                                  "landcover = landcover.asc\n"
                                  "r = r.asc\n"
                                  "k = k.asc\n"
                                  "cover_table = cover.csv\n"
                                  "n_landslides = 400\n"
                                  "iterations = 1000\n"
                                  "c_bare = 1\n"
                                  "bootstrap_resamples = 10000\n");
    } catch (const std::exception& e) {
        std::cerr << "lsero-synth: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
