#pragma once

// Text formats for simulation outputs:
//   results CSV  run,pre_total_t,post_total_t,union_area_ha,footprint_pre_t,footprint_post_t
//   report CSV   5 quantile rows x 4 columns
//   summary      key = value headline numbers
//   density CSV  bin_lo_km2,bin_hi_km2,count,density_km-2[,env_lo,env_hi]

#include <cstdint>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsero/bootstrap.hpp"
#include "lsero/error.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/montecarlo.hpp"
#include "lsero/stats.hpp"

namespace lsero {

/// Fixed 10-significant-digit formatting (printf %.10g).
inline std::string format_sig10(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline constexpr std::string_view kResultsHeader =
    "run,pre_total_t,post_total_t,union_area_ha,footprint_pre_t,footprint_post_t";

inline std::string format_results_csv(std::span<const IterationResult> runs) {
    std::string out(kResultsHeader);
    out += '\n';
    for (const auto& r : runs) {
        out += std::to_string(r.run_index);
        for (double v : {r.pre_total_t, r.post_total_t, r.union_area_ha, r.footprint_pre_t, r.footprint_post_t}) {
            out += ',';
            out += format_sig10(v);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<IterationResult> parse_results_csv(std::string_view text, const std::string& source = "<results>") {
    std::vector<IterationResult> runs;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != kResultsHeader) {
                throw ParseError(source, line_no, 1, "expected header '" + std::string(kResultsHeader) + "'");
            }
            header = true;
            continue;
        }
        double fields[6];
        std::size_t start = 0;
        for (int k = 0; k < 6; ++k) {
            const std::size_t comma = line.find(',', start);
            const bool last = k == 5;
            if (last != (comma == std::string_view::npos)) {
                throw ParseError(source, line_no, start + 1, "expected 6 comma-separated fields");
            }
            const std::string_view tok = line.substr(start, last ? std::string_view::npos : comma - start);
            if (!detail::parse_double(tok, fields[k])) {
                throw ParseError(source, line_no, start + 1, "non-numeric field '" + std::string(tok) + "'");
            }
            start = comma + 1;
        }
        if (fields[0] < 0 || fields[0] != std::floor(fields[0])) {
            throw ParseError(source, line_no, 1, "run index must be a nonnegative integer");
        }
        IterationResult r;
        r.run_index = static_cast<std::uint64_t>(fields[0]);
        r.pre_total_t = fields[1];
        r.post_total_t = fields[2];
        r.union_area_ha = fields[3];
        r.footprint_pre_t = fields[4];
        r.footprint_post_t = fields[5];
        runs.push_back(r);
    }
    if (!header) {
        throw ParseError(source, 1, 1, "empty results file");
    }
    return runs;
}

struct BootstrapConfig {
    Statistic statistic = Statistic::median;
    std::uint64_t n_resamples = 10'000;
    std::uint64_t seed = 0;
};

struct ReportRow {
    double level = 0.0;
    double pre_failure_t = 0.0;
    double post_failure_t = 0.0;
    double landslide_area_ha = 0.0;
    double landslide_area_pct = 0.0;
};

struct Report {
    BootstrapConfig config;
    std::size_t n_runs = 0;
    double catchment_area_ha = 0.0;
    std::vector<ReportRow> rows;  // one per kQuantileLevels entry
    BootstrapTable pre;           // footprint-restricted pre-failure loss
    BootstrapTable post;          // footprint-restricted post-failure loss
    BootstrapTable area;          // union landslide area
    BootstrapTable increase;      // catchment post - pre

    double median_total_ratio = 1.0;
    double median_footprint_ratio = 1.0;
    double median_increase_t = 0.0;
    double increase_pct = 0.0;
    SimulationSummary estimators;
};

namespace detail {

inline double ratio(double post, double pre) {
    if (pre > 0.0) {
        return post / pre;
    }
    return post > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

}  // namespace detail

/// Quantile table plus headline numbers. The pre/post columns are losses
/// restricted to the landslide footprints; the area column is the union
/// footprint area.
inline Report summary_report(const std::vector<IterationResult>& results, const BootstrapConfig& cfg,
                             double catchment_area_ha) {
    if (results.empty()) {
        throw DomainError("summary report needs at least one iteration result");
    }
    Report rep;
    rep.config = cfg;
    rep.n_runs = results.size();
    rep.catchment_area_ha = catchment_area_ha;

    const auto fpre = column(results, &IterationResult::footprint_pre_t);
    const auto fpost = column(results, &IterationResult::footprint_post_t);
    const auto area = column(results, &IterationResult::union_area_ha);
    std::vector<double> increase;
    std::vector<double> total_ratio;
    std::vector<double> fp_ratio;
    for (const auto& r : results) {
        increase.push_back(r.post_total_t - r.pre_total_t);
        total_ratio.push_back(detail::ratio(r.post_total_t, r.pre_total_t));
        fp_ratio.push_back(detail::ratio(r.footprint_post_t, r.footprint_pre_t));
    }

    rep.pre = bootstrap(fpre, cfg.statistic, cfg.n_resamples, cfg.seed, "pre_failure_t");
    rep.post = bootstrap(fpost, cfg.statistic, cfg.n_resamples, cfg.seed, "post_failure_t");
    rep.area = bootstrap(area, cfg.statistic, cfg.n_resamples, cfg.seed, "landslide_area_ha");
    rep.increase = bootstrap(increase, cfg.statistic, cfg.n_resamples, cfg.seed, "increase_t");

    for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) {
        ReportRow row;
        row.level = kQuantileLevels[q];
        row.pre_failure_t = rep.pre.quantiles[q];
        row.post_failure_t = rep.post.quantiles[q];
        row.landslide_area_ha = rep.area.quantiles[q];
        row.landslide_area_pct = catchment_area_ha > 0.0 ? 100.0 * row.landslide_area_ha / catchment_area_ha : 0.0;
        rep.rows.push_back(row);
    }

    rep.median_total_ratio = median(total_ratio);
    rep.median_footprint_ratio = median(fp_ratio);
    rep.median_increase_t = median(increase);
    rep.increase_pct = 100.0 * (rep.median_total_ratio - 1.0);
    rep.estimators = summarize(results);
    return rep;
}

inline constexpr std::string_view kReportHeader = "quantile,pre_failure_t,post_failure_t,landslide_area_ha (pct)";

inline std::string format_percent(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v);
    return buf;
}

inline std::string format_report_csv(const Report& rep) {
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& row : rep.rows) {
        char level[16];
        std::snprintf(level, sizeof(level), "%g%%", row.level * 100.0);
        out += level;
        out += ',' + format_sig10(row.pre_failure_t);
        out += ',' + format_sig10(row.post_failure_t);
        out += ',' + format_sig10(row.landslide_area_ha) + " (" + format_percent(row.landslide_area_pct) + ")";
        out += '\n';
    }
    return out;
}

inline std::string format_summary(const Report& rep) {
    std::string out;
    auto kv = [&out](std::string_view k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    kv("runs", std::to_string(rep.n_runs));
    kv("bootstrap_statistic", to_string(rep.config.statistic));
    kv("bootstrap_resamples", std::to_string(rep.config.n_resamples));
    kv("bootstrap_seed", std::to_string(rep.config.seed));
    kv("quantile_method", "nearest-rank");
    kv("catchment_area_ha", format_sig10(rep.catchment_area_ha));
    kv("median_total_ratio", format_sig10(rep.median_total_ratio));
    kv("median_footprint_ratio", format_sig10(rep.median_footprint_ratio));
    kv("median_increase_t", format_sig10(rep.median_increase_t));
    kv("increase_pct", format_sig10(rep.increase_pct));
    kv("increase_t_p05", format_sig10(rep.increase.lower_bound()));
    kv("landslide_area_ha_p05", format_sig10(rep.area.lower_bound()));
    kv("mean_pre_total_t", format_sig10(rep.estimators.mean_pre_total_t));
    kv("mean_post_total_t", format_sig10(rep.estimators.mean_post_total_t));
    kv("median_pre_total_t", format_sig10(rep.estimators.median_pre_total_t));
    kv("median_post_total_t", format_sig10(rep.estimators.median_post_total_t));
    kv("median_footprint_pre_t", format_sig10(rep.estimators.median_footprint_pre_t));
    kv("median_footprint_post_t", format_sig10(rep.estimators.median_footprint_post_t));
    kv("median_union_area_ha", format_sig10(rep.estimators.median_union_area_ha));
    return out;
}

inline std::string format_density_csv(const DensityBins& bins) {
    const bool env = !bins.env_lo.empty();
    std::string out = env ? "bin_lo_km2,bin_hi_km2,count,density_km-2,env_lo,env_hi\n"
                          : "bin_lo_km2,bin_hi_km2,count,density_km-2\n";
    for (std::size_t h = 0; h < bins.bins(); ++h) {
        out += format_sig10(bins.edges[h]) + ',' + format_sig10(bins.edges[h + 1]) + ',' +
               std::to_string(bins.count[h]) + ',' + format_sig10(bins.density[h]);
        if (env) {
            out += ',' + format_sig10(bins.env_lo[h]) + ',' + format_sig10(bins.env_hi[h]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace lsero
