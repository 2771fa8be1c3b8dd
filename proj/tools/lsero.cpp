// Command-line front end: terrain, erode, simulate, bootstrap, density.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lsero/lsero.hpp"

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagSpec kModelFlags[] = {
    {"--dem", "dem", "elevation grid (ESRI ASCII, m)"},
    {"--landcover", "landcover", "land-cover class grid"},
    {"--r", "r", "rainfall erosivity grid"},
    {"--k", "k", "soil erodibility grid"},
    {"--p", "p", "support practice grid (default 1)"},
    {"--st", "st", "stoniness grid (default 1)"},
    {"--cover-table", "cover_table", "CSV mapping class to C factor"},
};

constexpr FlagSpec kTerrainFlags[] = {
    {"--flow-length-mode", "flow_length_mode", "longest | mean"},
    {"--l-exponent", "l_exponent", "fixed slope-length exponent m (default: McCool)"},
    {"--s-threshold-deg", "s_threshold_deg", "slope angle switching the S formula"},
};

constexpr FlagSpec kSimulationFlags[] = {
    {"--eligibility", "eligibility", "grid of cells allowed to host landslides (non-zero)"},
    {"--n-landslides", "n_landslides", "landslides per iteration"},
    {"--iterations", "iterations", "Monte Carlo iterations"},
    {"--threads", "threads", "worker threads (outputs do not depend on it)"},
    {"--rho", "rho", "inverse-gamma shape"},
    {"--a-param", "a_param", "inverse-gamma scale (km^2)"},
    {"--s-param", "s_param", "inverse-gamma offset (km^2)"},
    {"--bare-min", "bare_min", "lower bound of the bare-soil fraction"},
    {"--c-bare", "c_bare", "C factor of bare soil"},
    {"--max-area-km2", "max_area_km2", "upper truncation of sampled areas"},
    {"--count-mode", "count_mode", "fixed | poisson"},
    {"--bins-per-decade", "bins_per_decade", "density histogram resolution"},
};

constexpr FlagSpec kBootstrapFlags[] = {
    {"--bootstrap-resamples", "bootstrap_resamples", "bootstrap resamples"},
    {"--bootstrap-statistic", "bootstrap_statistic", "median | mean | total"},
};

constexpr FlagSpec kSeedFlag = {"--seed", "seed", "master random seed"};
constexpr FlagSpec kOutFlag = {"--out", "out", "output directory"};

class Settings {
public:
    explicit Settings(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_, "key = value configuration file")->check(CLI::ExistingFile);
    }

    template <std::size_t N>
    void add(const FlagSpec (&specs)[N]) {
        for (const auto& s : specs) {
            add(s);
        }
    }

    void add(const FlagSpec& s) {
        values_.push_back(std::make_unique<std::string>());
        bound_.push_back({app_->add_option(s.flag, *values_.back(), s.help), s.key, values_.back().get()});
    }

    /// File values overlaid with command-line flags.
    lsero::RunConfig resolve() const {
        lsero::KeyValues kv;
        if (!config_.empty()) {
            kv = lsero::read_config_file(config_);
        }
        for (const auto& b : bound_) {
            if (b.opt->count() > 0) {
                kv[b.key] = *b.value;
            }
        }
        return lsero::build_run_config(kv);
    }

private:
    struct Bound {
        CLI::Option* opt;
        std::string key;
        std::string* value;
    };
    CLI::App* app_;
    std::string config_;
    std::vector<std::unique_ptr<std::string>> values_;
    std::vector<Bound> bound_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landslide-driven soil erosion: RUSLE with Monte Carlo landslide scenarios"};
    app.set_version_flag("--version", std::string("lsero ") + lsero::kVersion);
    app.require_subcommand(1);

    auto* terrain = app.add_subcommand("terrain", "slope, aspect and flow length from a DEM");
    Settings terrain_s(terrain);
    terrain_s.add(kModelFlags[0]);
    terrain_s.add(kTerrainFlags);
    terrain_s.add(kOutFlag);

    auto* erode = app.add_subcommand("erode", "pre-failure RUSLE soil loss");
    Settings erode_s(erode);
    erode_s.add(kModelFlags);
    erode_s.add(kTerrainFlags);
    erode_s.add(kOutFlag);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo landslide scenarios and bootstrap report");
    Settings simulate_s(simulate);
    simulate_s.add(kModelFlags);
    simulate_s.add(kTerrainFlags);
    simulate_s.add(kSimulationFlags);
    simulate_s.add(kBootstrapFlags);
    simulate_s.add(kSeedFlag);
    simulate_s.add(kOutFlag);

    auto* boot = app.add_subcommand("bootstrap", "bootstrap report from an existing results CSV");
    Settings boot_s(boot);
    boot_s.add(kBootstrapFlags);
    boot_s.add(kSeedFlag);
    boot_s.add(kOutFlag);
    std::string results_path;
    std::optional<double> catchment_ha;
    boot->add_option("results", results_path, "results CSV written by simulate")->required();
    boot->add_option("--catchment-ha", catchment_ha,
                     "catchment area in ha (default: run_metadata.txt beside the results)");

    auto* density = app.add_subcommand("density", "binned probability density of landslide areas");
    Settings density_s(density);
    density_s.add(kSeedFlag);
    density_s.add(kOutFlag);
    density_s.add(kSimulationFlags[11]);
    std::string areas_path;
    std::uint64_t n_total = 0;
    std::uint64_t envelope_resamples = 0;
    density->add_option("areas", areas_path, "areas in km^2, one per line")->required();
    density->add_option("--n-total", n_total, "inventory size used for normalisation (default: list length)");
    density->add_option("--envelope-resamples", envelope_resamples, "bootstrap resamples for density envelopes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (terrain->parsed()) {
            lsero::run_terrain(terrain_s.resolve());
        } else if (erode->parsed()) {
            const double t = lsero::run_erode(erode_s.resolve());
            std::cout << "pre_total_t = " << lsero::format_sig10(t) << '\n';
        } else if (simulate->parsed()) {
            const auto res = lsero::run_simulate(simulate_s.resolve());
            std::cout << lsero::format_summary(res.report);
        } else if (boot->parsed()) {
            const auto cfg = boot_s.resolve();
            if (!catchment_ha) {
                catchment_ha = lsero::metadata_catchment_area(std::filesystem::path(results_path).parent_path() /
                                                              "run_metadata.txt");
            }
            if (!catchment_ha) {
                throw lsero::ConfigError("catchment area unknown: pass --catchment-ha or keep run_metadata.txt "
                                         "beside '" + results_path + "'");
            }
            const auto rep = lsero::run_bootstrap(cfg, results_path, *catchment_ha);
            std::cout << lsero::format_summary(rep);
        } else if (density->parsed()) {
            const auto bins = lsero::run_density(density_s.resolve(), areas_path, n_total, envelope_resamples);
            std::cout << "bins = " << bins.bins() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "lsero: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
