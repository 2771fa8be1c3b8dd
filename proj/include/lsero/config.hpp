#pragma once

// Run configuration: flat `key = value` text with `#` comments. Command-line
// flags are merged over file values before the typed RunConfig is built.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "lsero/bootstrap.hpp"
#include "lsero/error.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/montecarlo.hpp"
#include "lsero/report.hpp"
#include "lsero/rusle.hpp"
#include "lsero/terrain.hpp"
#include "lsero/version.hpp"

namespace lsero {

using KeyValues = std::map<std::string, std::string>;

/// Keys holding file paths; relative values in a config file resolve against
/// the file's directory.
inline constexpr std::string_view kPathKeys[] = {"dem", "landcover", "r", "k", "p", "st", "cover_table",
                                                 "eligibility", "out"};

inline constexpr std::string_view kKnownKeys[] = {
    "dem",          "landcover",        "r",                "k",                   "p",
    "st",           "cover_table",      "eligibility",      "out",                 "n_landslides",
    "iterations",   "seed",             "threads",          "rho",                 "a_param",
    "s_param",      "bare_min",         "c_bare",           "max_area_km2",        "count_mode",
    "flow_length_mode", "l_exponent",   "s_threshold_deg",  "bootstrap_resamples", "bootstrap_statistic",
    "bins_per_decade"};

inline bool is_known_key(std::string_view k) {
    for (auto known : kKnownKeys) {
        if (known == k) {
            return true;
        }
    }
    return false;
}

inline KeyValues parse_key_values(std::string_view text, const std::string& source = "<config>") {
    KeyValues kv;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto trim = [](std::string_view s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string_view::npos) {
            return std::string_view{};
        }
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
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
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source, line_no, 1, "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!is_known_key(key)) {
            throw ParseError(source, line_no, 1, "unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ParseError(source, line_no, eq + 2, "key '" + key + "' has an empty value");
        }
        if (kv.count(key)) {
            throw ParseError(source, line_no, 1, "duplicate key '" + key + "'");
        }
        kv[key] = value;
    }
    return kv;
}

inline KeyValues read_config_file(const std::filesystem::path& path) {
    KeyValues kv = parse_key_values(detail::read_file(path), path.string());
    const auto base = path.parent_path();
    for (auto key : kPathKeys) {
        auto it = kv.find(std::string(key));
        if (it != kv.end() && std::filesystem::path(it->second).is_relative()) {
            it->second = (base / it->second).lexically_normal().string();
        }
    }
    return kv;
}

struct RunConfig {
    std::string dem;
    std::string landcover;
    std::string r;
    std::string k;
    std::string p;
    std::string st;
    std::string cover_table;
    std::string eligibility;
    std::string out = ".";
    bool seed_given = false;
    SimulationConfig sim;
    TerrainFactorOptions terrain;
    BootstrapConfig boot;
    int bins_per_decade = 10;
};

namespace detail {

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError(key + " must be a nonnegative integer, got '" + v + "'");
    }
    return out;
}

inline double to_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    if (!parse_double(v, out) || !std::isfinite(out)) {
        throw ConfigError(key + " must be a finite number, got '" + v + "'");
    }
    return out;
}

}  // namespace detail

inline RunConfig build_run_config(const KeyValues& kv) {
    RunConfig c;
    for (const auto& [key, v] : kv) {
        if (!is_known_key(key)) {
            throw ConfigError("unknown key '" + key + "'");
        }
        if (key == "dem") c.dem = v;
        else if (key == "landcover") c.landcover = v;
        else if (key == "r") c.r = v;
        else if (key == "k") c.k = v;
        else if (key == "p") c.p = v;
        else if (key == "st") c.st = v;
        else if (key == "cover_table") c.cover_table = v;
        else if (key == "eligibility") c.eligibility = v;
        else if (key == "out") c.out = v;
        else if (key == "n_landslides") c.sim.n_landslides = detail::to_u64(key, v);
        else if (key == "iterations") c.sim.n_iterations = detail::to_u64(key, v);
        else if (key == "seed") {
            c.sim.seed = detail::to_u64(key, v);
            c.seed_given = true;
        } else if (key == "threads") {
            const auto t = detail::to_u64(key, v);
            if (t < 1 || t > 4096) {
                throw ConfigError("threads must lie in [1, 4096]");
            }
            c.sim.threads = static_cast<unsigned>(t);
        } else if (key == "rho") c.sim.params.rho = detail::to_real(key, v);
        else if (key == "a_param") c.sim.params.a = detail::to_real(key, v);
        else if (key == "s_param") c.sim.params.s = detail::to_real(key, v);
        else if (key == "bare_min") c.sim.bare_min = detail::to_real(key, v);
        else if (key == "c_bare") c.sim.c_bare = detail::to_real(key, v);
        else if (key == "max_area_km2") c.sim.max_area_km2 = detail::to_real(key, v);
        else if (key == "count_mode") c.sim.count_mode = parse_count_mode(v);
        else if (key == "flow_length_mode") c.terrain.flow_length_mode = parse_flow_length_mode(v);
        else if (key == "l_exponent") {
            const double m = detail::to_real(key, v);
            if (!(m >= 0.0)) {
                throw ConfigError("l_exponent must be nonnegative");
            }
            c.terrain.l_exponent = m;
        } else if (key == "s_threshold_deg") c.terrain.steepness_threshold_deg = detail::to_real(key, v);
        else if (key == "bootstrap_resamples") c.boot.n_resamples = detail::to_u64(key, v);
        else if (key == "bootstrap_statistic") c.boot.statistic = parse_statistic(v);
        else if (key == "bins_per_decade") {
            const auto b = detail::to_u64(key, v);
            if (b < 1 || b > 1000) {
                throw ConfigError("bins_per_decade must lie in [1, 1000]");
            }
            c.bins_per_decade = static_cast<int>(b);
        }
    }
    c.boot.seed = c.sim.seed;
    return c;
}

/// Canonical text of every setting that can influence outputs (threads and the
/// output directory excluded).
inline std::string canonical_config(const RunConfig& c) {
    std::string s;
    auto kv = [&s](std::string_view k, const std::string& v) {
        s += k;
        s += " = ";
        s += v;
        s += '\n';
    };
    kv("dem", c.dem);
    kv("landcover", c.landcover);
    kv("r", c.r);
    kv("k", c.k);
    kv("p", c.p);
    kv("st", c.st);
    kv("cover_table", c.cover_table);
    kv("eligibility", c.eligibility);
    kv("n_landslides", std::to_string(c.sim.n_landslides));
    kv("iterations", std::to_string(c.sim.n_iterations));
    kv("seed", std::to_string(c.sim.seed));
    kv("rho", format_shortest(c.sim.params.rho));
    kv("a_param", format_shortest(c.sim.params.a));
    kv("s_param", format_shortest(c.sim.params.s));
    kv("bare_min", format_shortest(c.sim.bare_min));
    kv("c_bare", format_shortest(c.sim.c_bare));
    kv("max_area_km2", format_shortest(c.sim.max_area_km2));
    kv("count_mode", to_string(c.sim.count_mode));
    kv("flow_length_mode", to_string(c.terrain.flow_length_mode));
    kv("l_exponent", c.terrain.l_exponent ? format_shortest(*c.terrain.l_exponent) : std::string("mccool"));
    kv("s_threshold_deg", format_shortest(c.terrain.steepness_threshold_deg));
    kv("bootstrap_resamples", std::to_string(c.boot.n_resamples));
    kv("bootstrap_statistic", to_string(c.boot.statistic));
    kv("bins_per_decade", std::to_string(c.bins_per_decade));
    return s;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace lsero
