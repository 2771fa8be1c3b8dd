#pragma once

// File-level workflows behind the command-line subcommands.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsero/bootstrap.hpp"
#include "lsero/config.hpp"
#include "lsero/error.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/montecarlo.hpp"
#include "lsero/report.hpp"
#include "lsero/rusle.hpp"
#include "lsero/terrain.hpp"
#include "lsero/version.hpp"

namespace lsero {

namespace fs = std::filesystem;

inline void require_key(const std::string& value, const char* key) {
    if (value.empty()) {
        throw ConfigError(std::string("missing required setting '") + key + "'");
    }
}

inline void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw Error("cannot create output directory '" + out + "'");
    }
}

inline Raster read_named_grid(const std::string& path, const char* role) {
    if (!fs::exists(path)) {
        throw Error(std::string(role) + " grid '" + path + "' does not exist");
    }
    return read_grid(path);
}

/// Static model inputs: terrain-derived L and S plus the factor rasters.
struct ModelInputs {
    TerrainFactors terrain;
    FactorStack stack;
    std::optional<Raster> eligibility;
};

inline ModelInputs load_model(const RunConfig& cfg) {
    require_key(cfg.dem, "dem");
    require_key(cfg.landcover, "landcover");
    require_key(cfg.r, "r");
    require_key(cfg.k, "k");
    require_key(cfg.cover_table, "cover_table");
    const Raster dem = read_named_grid(cfg.dem, "dem");
    const Raster landcover = read_named_grid(cfg.landcover, "landcover");
    Raster R = read_named_grid(cfg.r, "R");
    Raster K = read_named_grid(cfg.k, "K");
    if (!fs::exists(cfg.cover_table)) {
        throw Error("cover table '" + cfg.cover_table + "' does not exist");
    }
    const CoverTable cover = read_cover_table(cfg.cover_table);

    for (const Raster* r : {&landcover, static_cast<const Raster*>(&R), static_cast<const Raster*>(&K)}) {
        require_same_grid(dem, *r, "input grids");
    }
    TerrainFactors terrain = terrain_factors(dem, cfg.terrain);
    Raster C = c_factor(landcover, cover);
    FactorStack stack{std::move(R), std::move(K), terrain.L, terrain.S, std::move(C), std::nullopt, std::nullopt};
    if (!cfg.p.empty()) {
        stack.P = read_named_grid(cfg.p, "P");
    }
    if (!cfg.st.empty()) {
        stack.St = read_named_grid(cfg.st, "St");
    }
    stack.validate();

    ModelInputs in{std::move(terrain), std::move(stack), std::nullopt};
    if (!cfg.eligibility.empty()) {
        in.eligibility = read_named_grid(cfg.eligibility, "eligibility");
        require_same_grid(dem, *in.eligibility, "eligibility mask");
    }
    return in;
}

inline void write_metadata(const RunConfig& cfg, const std::string& command,
                           const std::vector<std::pair<std::string, std::string>>& extra) {
    std::string s;
    s += "software = lsero " + std::string(kVersion) + "\n";
    s += "command = " + command + "\n";
    s += "config_hash = " + hex64(fnv1a64(canonical_config(cfg))) + "\n";
    s += "seed = " + (cfg.seed_given ? std::to_string(cfg.sim.seed) : std::string("none")) + "\n";
    for (const auto& [k, v] : extra) {
        s += k + " = " + v + "\n";
    }
    s += "\n# canonical configuration\n";
    s += canonical_config(cfg);
    detail::write_file(fs::path(cfg.out) / "run_metadata.txt", s);
}

/// slope.asc, aspect.asc, flowlen.asc
inline void run_terrain(const RunConfig& cfg) {
    require_key(cfg.dem, "dem");
    ensure_out_dir(cfg.out);
    const Raster dem = read_named_grid(cfg.dem, "dem");
    const auto sa = slope_aspect(dem);
    const auto field = dinf_directions(dem);
    const auto len = flow_length(field, cfg.terrain.flow_length_mode);
    write_grid(sa.slope, fs::path(cfg.out) / "slope.asc");
    write_grid(sa.aspect, fs::path(cfg.out) / "aspect.asc");
    write_grid(len, fs::path(cfg.out) / "flowlen.asc");
    write_metadata(cfg, "terrain", {});
}

/// erosion_pre.asc; returns the total soil loss in t/yr.
inline double run_erode(const RunConfig& cfg) {
    ensure_out_dir(cfg.out);
    const ModelInputs in = load_model(cfg);
    const Raster e = erosion(in.stack);
    write_grid(e, fs::path(cfg.out) / "erosion_pre.asc");
    const double t = total(e);
    write_metadata(cfg, "erode", {{"pre_total_t", format_sig10(t)}});
    return t;
}

struct SimulateResult {
    std::vector<IterationResult> runs;  // as written (10 significant digits)
    Report report;
    DensityBins density;
    double catchment_area_ha = 0.0;
};

/// results.csv, report.csv, summary.txt, density.csv, run_metadata.txt.
inline SimulateResult run_simulate(const RunConfig& cfg) {
    if (!cfg.seed_given) {
        throw ConfigError("simulate requires an explicit seed");
    }
    ensure_out_dir(cfg.out);
    const ModelInputs in = load_model(cfg);
    const Scenario sc(in.stack, cfg.sim, in.eligibility ? &*in.eligibility : nullptr);
    const SimulationOutput sim = run_simulation(sc, cfg.sim);

    const std::string results_text = format_results_csv(sim.runs);
    detail::write_file(fs::path(cfg.out) / "results.csv", results_text);

    SimulateResult res;
    // analyse the values as written, so `bootstrap` on results.csv reproduces the report
    res.runs = parse_results_csv(results_text);
    res.catchment_area_ha = sc.catchment_area_ha();
    res.report = summary_report(res.runs, cfg.boot, res.catchment_area_ha);
    detail::write_file(fs::path(cfg.out) / "report.csv", format_report_csv(res.report));
    detail::write_file(fs::path(cfg.out) / "summary.txt", format_summary(res.report));

    std::vector<double> areas;
    for (const auto& run : sim.areas_km2) {
        areas.insert(areas.end(), run.begin(), run.end());
    }
    res.density = density_bins(areas, areas.size(), cfg.bins_per_decade);
    detail::write_file(fs::path(cfg.out) / "density.csv", format_density_csv(res.density));

    write_metadata(cfg, "simulate",
                   {{"area_truncation_min_km2", format_shortest(sc.bounds().min_km2)},
                    {"area_truncation_max_km2", format_shortest(sc.bounds().max_km2)},
                    {"catchment_area_ha", format_shortest(res.catchment_area_ha)},
                    {"eligible_cells", std::to_string(sc.domain().capacity())},
                    {"quantile_method", "nearest-rank"}});
    return res;
}

/// Reads `catchment_area_ha` from a run_metadata.txt, if present.
inline std::optional<double> metadata_catchment_area(const fs::path& metadata) {
    if (!fs::exists(metadata)) {
        return std::nullopt;
    }
    const std::string text = detail::read_file(metadata);
    const std::string key = "catchment_area_ha = ";
    const auto pos = text.find(key);
    if (pos == std::string::npos) {
        return std::nullopt;
    }
    const auto eol = text.find('\n', pos);
    double v = 0.0;
    if (!detail::parse_double(text.substr(pos + key.size(), eol - pos - key.size()), v)) {
        return std::nullopt;
    }
    return v;
}

/// Re-analyses an existing results CSV: report.csv and summary.txt.
inline Report run_bootstrap(const RunConfig& cfg, const std::string& results_path, double catchment_area_ha) {
    if (!cfg.seed_given) {
        throw ConfigError("bootstrap requires an explicit seed");
    }
    if (!fs::exists(results_path)) {
        throw Error("results file '" + results_path + "' does not exist");
    }
    ensure_out_dir(cfg.out);
    const auto runs = parse_results_csv(detail::read_file(results_path), results_path);
    const Report rep = summary_report(runs, cfg.boot, catchment_area_ha);
    detail::write_file(fs::path(cfg.out) / "report.csv", format_report_csv(rep));
    detail::write_file(fs::path(cfg.out) / "summary.txt", format_summary(rep));
    return rep;
}

/// Areas (km^2), one per line; blank lines, `#` comments and a non-numeric
/// first line (header) are skipped.
inline std::vector<double> parse_area_list(std::string_view text, const std::string& source = "<areas>") {
    std::vector<double> areas;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string_view::npos) {
            continue;
        }
        const auto b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        double v = 0.0;
        if (!detail::parse_double(line, v)) {
            if (areas.empty() && line_no == 1) {
                continue;
            }
            throw ParseError(source, line_no, a + 1, "non-numeric area '" + std::string(line) + "'");
        }
        if (!(v > 0.0)) {
            throw ParseError(source, line_no, a + 1, "areas must be positive");
        }
        areas.push_back(v);
    }
    return areas;
}

/// density.csv for an area list; bootstrap envelopes when n_resamples > 0.
inline DensityBins run_density(const RunConfig& cfg, const std::string& areas_path, std::uint64_t n_total,
                               std::uint64_t n_resamples) {
    if (!fs::exists(areas_path)) {
        throw Error("area list '" + areas_path + "' does not exist");
    }
    ensure_out_dir(cfg.out);
    const auto areas = parse_area_list(detail::read_file(areas_path), areas_path);
    if (areas.empty()) {
        throw DomainError("area list '" + areas_path + "' is empty");
    }
    const std::uint64_t n = n_total > 0 ? n_total : areas.size();
    DensityBins bins = density_bins(areas, n, cfg.bins_per_decade);
    if (n_resamples > 0) {
        if (!cfg.seed_given) {
            throw ConfigError("bootstrap envelopes require an explicit seed");
        }
        add_bootstrap_envelope(bins, areas, n, n_resamples, cfg.sim.seed);
    }
    detail::write_file(fs::path(cfg.out) / "density.csv", format_density_csv(bins));
    return bins;
}

}  // namespace lsero
