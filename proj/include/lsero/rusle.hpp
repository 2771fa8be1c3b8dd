#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "lsero/error.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/raster.hpp"
#include "lsero/terrain.hpp"

namespace lsero {

inline constexpr double kDegree = std::numbers::pi / 180.0;
inline constexpr double kSteepnessThresholdDeg = 12.73;
inline constexpr double kUnitPlotLength = 22.13;  // m

// ---------------------------------------------------------------------------
// Slope steepness

/// Moore & Burch: S = (sin t / 0.0896)^1.3. Zero on flat ground.
inline double moore_burch_s(double theta) { return std::pow(std::sin(theta) / 0.0896, 1.3); }

/// Nearing: S = -1.5 + 17 / (1 + exp(2.3 - 6.1 sin t)).
inline double nearing_s(double theta) { return -1.5 + 17.0 / (1.0 + std::exp(2.3 - 6.1 * std::sin(theta))); }

/// Merged S factor: Moore & Burch below the threshold, Nearing at and above it.
inline double s_factor_value(double theta, double threshold_deg = kSteepnessThresholdDeg) {
    if (!(theta >= 0.0)) {
        throw InvariantError("slope must be nonnegative, got " + std::to_string(theta));
    }
    return theta < threshold_deg * kDegree ? moore_burch_s(theta) : nearing_s(theta);
}

inline Raster s_factor(const Raster& slope, double threshold_deg = kSteepnessThresholdDeg) {
    return map1(slope, [threshold_deg](double t) { return s_factor_value(t, threshold_deg); });
}

// ---------------------------------------------------------------------------
// Slope length

/// McCool exponent m = beta / (1 + beta), beta = (sin t / 0.0896) / (3 sin^0.8 t + 0.56).
inline double mccool_exponent(double theta) {
    const double st = std::sin(theta);
    const double beta = (st / 0.0896) / (3.0 * std::pow(st, 0.8) + 0.56);
    return beta / (1.0 + beta);
}

/// L = (max(lambda, cellsize) / 22.13)^m. A fixed exponent overrides McCool.
inline double l_factor_value(double lambda, double theta, double cellsize,
                             std::optional<double> fixed_exponent = std::nullopt) {
    if (!(lambda >= 0.0)) {
        throw InvariantError("slope length must be nonnegative, got " + std::to_string(lambda));
    }
    const double m = fixed_exponent ? *fixed_exponent : mccool_exponent(theta);
    return std::pow(std::max(lambda, cellsize) / kUnitPlotLength, m);
}

inline Raster l_factor(const Raster& lambda, const Raster& slope, std::optional<double> fixed_exponent = std::nullopt) {
    const double cs = lambda.header().cellsize;
    return map2(lambda, slope,
                [cs, fixed_exponent](double len, double t) { return l_factor_value(len, t, cs, fixed_exponent); });
}

// ---------------------------------------------------------------------------
// Cover management

/// Land-cover class code -> C factor.
class CoverTable {
public:
    CoverTable() = default;
    CoverTable(std::initializer_list<std::pair<const int, double>> init) {
        for (const auto& [k, v] : init) {
            set(k, v);
        }
    }

    void set(int code, double c) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw ConfigError("C factor for class " + std::to_string(code) + " must lie in [0, 1], got " +
                              std::to_string(c));
        }
        table_[code] = c;
    }

    std::optional<double> find(int code) const {
        auto it = table_.find(code);
        if (it == table_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t size() const noexcept { return table_.size(); }
    const std::map<int, double>& entries() const noexcept { return table_; }

private:
    std::map<int, double> table_;
};

/// CSV with header `class,c_factor`; `#` lines and blank lines are skipped.
inline CoverTable parse_cover_table(std::string_view text, const std::string& source = "<cover table>") {
    CoverTable table;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            if (eol == text.size()) {
                break;
            }
            continue;
        }
        line = line.substr(first);
        if (!header_seen) {
            std::string compact;
            for (char c : line) {
                if (c != ' ' && c != '\t') {
                    compact += c;
                }
            }
            if (compact != "class,c_factor") {
                throw ParseError(source, line_no, 1, "expected header 'class,c_factor'");
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(source, line_no, 1, "expected two comma-separated fields");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string code_s = trim(line.substr(0, comma));
        const std::string c_s = trim(line.substr(comma + 1));
        double code_d = 0.0;
        double c = 0.0;
        if (!detail::parse_double(code_s, code_d) || code_d != std::floor(code_d) || std::fabs(code_d) > 2e9) {
            throw ParseError(source, line_no, 1, "class must be an integer, got '" + code_s + "'");
        }
        if (!detail::parse_double(c_s, c)) {
            throw ParseError(source, line_no, comma + 2, "c_factor must be numeric, got '" + c_s + "'");
        }
        const int code = static_cast<int>(code_d);
        if (table.find(code)) {
            throw ParseError(source, line_no, 1, "duplicate class " + code_s);
        }
        try {
            table.set(code, c);
        } catch (const ConfigError& e) {
            throw ParseError(source, line_no, comma + 2, e.what());
        }
        if (eol == text.size()) {
            break;
        }
    }
    if (!header_seen) {
        throw ParseError(source, 1, 1, "empty cover table");
    }
    return table;
}

inline CoverTable read_cover_table(const std::filesystem::path& path) {
    return parse_cover_table(detail::read_file(path), path.string());
}

/// Per-cell lookup of the land-cover class code. Output role: proportion.
inline Raster c_factor(const Raster& landcover, const CoverTable& table) {
    Raster out(landcover.header(), 0.0);
    for (std::size_t i = 0; i < landcover.size(); ++i) {
        if (!landcover.valid(i)) {
            out.invalidate(i);
            continue;
        }
        const double v = landcover.value(i);
        if (v != std::floor(v) || std::fabs(v) > 2e9) {
            throw ConfigError("land-cover cell " + std::to_string(i) + " holds non-integer class " +
                              format_shortest(v));
        }
        const int code = static_cast<int>(v);
        const auto c = table.find(code);
        if (!c) {
            throw ConfigError("land-cover class " + std::to_string(code) + " has no entry in the cover table");
        }
        out.set(i, *c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Soil loss

/// e-RUSLE factor rasters. P and St default to a constant 1 when absent.
struct FactorStack {
    Raster R;
    Raster K;
    Raster L;
    Raster S;
    Raster C;
    std::optional<Raster> P;
    std::optional<Raster> St;

    void validate() const {
        const Raster* all[] = {&R, &K, &L, &S, &C};
        for (const Raster* r : all) {
            require_same_grid(R, *r, "factor stack");
        }
        if (P) {
            require_same_grid(R, *P, "factor stack");
        }
        if (St) {
            require_same_grid(R, *St, "factor stack");
        }
        require_nonnegative(R, "R factor");
        require_nonnegative(K, "K factor");
        require_nonnegative(L, "L factor");
        require_nonnegative(S, "S factor");
        require_proportion(C, "C factor");
        if (P) {
            require_proportion(*P, "P factor");
        }
        if (St) {
            require_proportion(*St, "St factor");
        }
    }
};

/// R*K*L*S*P*St, the part of the soil-loss product that landslides leave alone.
inline Raster static_product(const FactorStack& stack) {
    stack.validate();
    Raster out(stack.R.header(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        bool ok = stack.R.valid(i) && stack.K.valid(i) && stack.L.valid(i) && stack.S.valid(i) && stack.C.valid(i);
        ok = ok && (!stack.P || stack.P->valid(i)) && (!stack.St || stack.St->valid(i));
        if (!ok) {
            out.invalidate(i);
            continue;
        }
        double v = stack.R.value(i) * stack.K.value(i) * stack.L.value(i) * stack.S.value(i);
        if (stack.P) {
            v *= stack.P->value(i);
        }
        if (stack.St) {
            v *= stack.St->value(i);
        }
        out.set(i, v);
    }
    return out;
}

/// Per-cell soil loss (t ha^-1 yr^-1), evaluated as (R*K*L*S*P*St) * C.
inline Raster erosion(const FactorStack& stack) {
    const Raster base = static_product(stack);
    return map2(base, stack.C, [](double b, double c) { return b * c; });
}

// ---------------------------------------------------------------------------
// DEM -> L, S

struct TerrainFactorOptions {
    double steepness_threshold_deg = kSteepnessThresholdDeg;
    std::optional<double> l_exponent;
    FlowLengthMode flow_length_mode = FlowLengthMode::longest;
};

struct TerrainFactors {
    Raster slope;
    Raster aspect;
    FlowField flow;
    Raster flow_length;
    Raster L;
    Raster S;
};

/// Slope, D-infinity flow length and the L and S factors. No-flow cells
/// (pits, flats) take L = 1.
inline TerrainFactors terrain_factors(const Raster& dem, const TerrainFactorOptions& opt = {}) {
    auto sa = slope_aspect(dem);
    FlowField flow = dinf_directions(dem);
    Raster len = flow_length(flow, opt.flow_length_mode);
    Raster L = l_factor(len, sa.slope, opt.l_exponent);
    for (std::size_t i = 0; i < L.size(); ++i) {
        if (flow.valid[i] && !flow.flows(i) && L.valid(i)) {
            L.set(i, 1.0);
        }
    }
    Raster S = s_factor(sa.slope, opt.steepness_threshold_deg);
    return TerrainFactors{std::move(sa.slope), std::move(sa.aspect), std::move(flow),
                          std::move(len),      std::move(L),        std::move(S)};
}

}  // namespace lsero
