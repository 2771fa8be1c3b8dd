#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lsero/error.hpp"
#include "lsero/exact_sum.hpp"
#include "lsero/landslide.hpp"
#include "lsero/raster.hpp"
#include "lsero/rng.hpp"
#include "lsero/rusle.hpp"
#include "lsero/stats.hpp"

namespace lsero {

enum class CountMode { fixed, poisson };

inline CountMode parse_count_mode(const std::string& s) {
    if (s == "fixed") {
        return CountMode::fixed;
    }
    if (s == "poisson") {
        return CountMode::poisson;
    }
    throw ConfigError("unknown count_mode '" + s + "' (expected fixed or poisson)");
}

inline const char* to_string(CountMode m) { return m == CountMode::fixed ? "fixed" : "poisson"; }

struct SimulationConfig {
    std::uint64_t n_iterations = 1000;
    std::uint64_t n_landslides = 1;
    std::uint64_t seed = 0;
    double c_bare = 1.0;
    double bare_min = 0.2;
    InverseGammaParams params{};
    CountMode count_mode = CountMode::fixed;
    double max_area_km2 = 1.0;  // upper truncation of sampled areas
    unsigned threads = 1;       // never affects results

    void validate() const {
        if (n_iterations < 1) {
            throw ConfigError("iterations must be >= 1");
        }
        if (n_landslides < 1) {
            throw ConfigError("n_landslides must be >= 1");
        }
        if (!(c_bare >= 0.0 && c_bare <= 1.0)) {
            throw ConfigError("c_bare must lie in [0, 1]");
        }
        if (!(bare_min >= 0.0 && bare_min <= 1.0)) {
            throw ConfigError("bare_min must lie in [0, 1]");
        }
        if (!(max_area_km2 > 0.0)) {
            throw ConfigError("max_area_km2 must be positive");
        }
        if (threads < 1) {
            throw ConfigError("threads must be >= 1");
        }
        try {
            params.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(std::string("inverse-gamma parameters: ") + e.what());
        }
    }
};

/// Totals of one Monte Carlo run. Footprint totals are restricted to the union
/// of all landslide footprint cells of the run.
struct IterationResult {
    std::uint64_t run_index = 0;
    double pre_total_t = 0.0;   // t/yr
    double post_total_t = 0.0;  // t/yr
    double union_area_ha = 0.0;
    double footprint_pre_t = 0.0;
    double footprint_post_t = 0.0;

    bool operator==(const IterationResult&) const = default;
};

/// Post-failure C on a landslide cell: f*c_bare + (1-f)*C_pre, written so that
/// c_bare == C_pre returns C_pre exactly and c_bare >= C_pre never lowers C.
inline double mix_cover(double c_pre, double bare_fraction, double c_bare) {
    const double c = c_pre + bare_fraction * (c_bare - c_pre);
    return std::clamp(c, 0.0, 1.0);
}

/// Full-raster C patch. Overlapping events take the maximum bare fraction.
inline Raster patch_c_factor(const Raster& c_pre, const std::vector<LandslideEvent>& events, double c_bare) {
    require_proportion(c_pre, "C factor");
    if (!(c_bare >= 0.0 && c_bare <= 1.0)) {
        throw InvariantError("c_bare must be a proportion");
    }
    std::vector<double> f(c_pre.size(), -1.0);
    for (const auto& ev : events) {
        for (std::size_t k = 0; k < ev.footprint.size(); ++k) {
            const std::size_t i = ev.footprint[k];
            if (i >= c_pre.size() || !c_pre.valid(i)) {
                throw PlacementError("footprint cell " + std::to_string(i) + " is not a valid C-factor cell");
            }
            f[i] = std::max(f[i], ev.bare_fraction[k]);
        }
    }
    Raster out = c_pre;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (f[i] >= 0.0) {
            out.set(i, mix_cover(c_pre.value(i), f[i], c_bare));
        }
    }
    return out;
}

/// Landslide-independent state shared read-only by all iterations: the static
/// factor product, pre-failure C, per-cell pre-failure loss and its exact total,
/// and the placement domain.
class Scenario {
public:
    Scenario(const FactorStack& stack, const SimulationConfig& config, const Raster* eligibility = nullptr)
        : header_{stack.R.header()},
          base_{static_product(stack)},
          c_pre_{stack.C},
          pre_cell_t_(header_.size(), 0.0),
          domain_{make_eligible(eligibility), footprint_cells(config.max_area_km2, stack.R.header())} {
        config.validate();
        if (config.max_area_km2 < header_.cell_area_km2()) {
            throw ConfigError("max_area_km2 is smaller than one cell");
        }
        bounds_ = AreaBounds{header_.cell_area_km2(), config.max_area_km2};
        const double ha = header_.cell_area_ha();
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (base_.valid(i)) {
                pre_cell_t_[i] = (base_.value(i) * c_pre_.value(i)) * ha;
                pre_total_.add(pre_cell_t_[i]);
                ++valid_cells_;
            }
        }
    }

    const GridHeader& header() const noexcept { return header_; }
    const Raster& base() const noexcept { return base_; }
    const Raster& c_pre() const noexcept { return c_pre_; }
    const PlacementDomain& domain() const noexcept { return domain_; }
    const AreaBounds& bounds() const noexcept { return bounds_; }
    double pre_cell_t(std::size_t i) const noexcept { return pre_cell_t_[i]; }
    const ExactSum& pre_total_sum() const noexcept { return pre_total_; }
    double pre_total_t() const { return pre_total_.value(); }
    double catchment_area_ha() const noexcept { return static_cast<double>(valid_cells_) * header_.cell_area_ha(); }

private:
    Raster make_eligible(const Raster* eligibility) const {
        if (eligibility) {
            require_same_grid(base_, *eligibility, "eligibility mask");
        }
        Raster el(header_, 1.0);
        for (std::size_t i = 0; i < el.size(); ++i) {
            bool ok = base_.valid(i);
            if (eligibility) {
                ok = ok && eligibility->valid(i) && eligibility->value(i) != 0.0;
            }
            if (!ok) {
                el.invalidate(i);
            }
        }
        return el;
    }

    GridHeader header_;
    Raster base_;
    Raster c_pre_;
    std::vector<double> pre_cell_t_;
    ExactSum pre_total_;
    std::size_t valid_cells_ = 0;
    PlacementDomain domain_;
    AreaBounds bounds_{};
};

/// Landslides of one run. Landslide k of run r draws from its own substream
/// (seed, r, k), so a run is reproducible in isolation.
inline std::vector<LandslideEvent> draw_events(const Scenario& sc, const SimulationConfig& config,
                                               std::uint64_t run_index) {
    std::uint64_t n = config.n_landslides;
    if (config.count_mode == CountMode::poisson) {
        Stream count_rng = Stream::derive(config.seed, StreamTag::landslide_count, {run_index});
        n = count_rng.poisson(static_cast<double>(config.n_landslides));
    }
    std::vector<LandslideEvent> events;
    events.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        Stream rng = Stream::derive(config.seed, StreamTag::landslide, {run_index, k});
        const double area = sample_area(config.params, rng, sc.bounds());
        events.push_back(place_landslide(area, sc.domain(), rng, config.bare_min));
    }
    return events;
}

/// Per-thread scratch for run_iteration: max bare fraction per cell (-1 when
/// untouched) and the list of touched cells.
struct IterationWorkspace {
    explicit IterationWorkspace(std::size_t cells) : fmax(cells, -1.0) {}

    std::vector<double> fmax;
    std::vector<std::size_t> touched;
};

/// Totals for one run given its events. Only footprint cells are visited; the
/// post total is the exact pre total minus their pre loss plus their post loss,
/// which equals the exactly rounded full-grid recomputation.
inline IterationResult accumulate(const Scenario& sc, const SimulationConfig& config, std::uint64_t run_index,
                                  const std::vector<LandslideEvent>& events, IterationWorkspace& ws) {
    auto& f = ws.fmax;
    auto& touched = ws.touched;
    touched.clear();
    for (const auto& ev : events) {
        for (std::size_t k = 0; k < ev.footprint.size(); ++k) {
            const std::size_t i = ev.footprint[k];
            if (f[i] < 0.0) {
                touched.push_back(i);
            }
            f[i] = std::max(f[i], ev.bare_fraction[k]);
        }
    }
    const double ha = sc.header().cell_area_ha();
    ExactSum post = sc.pre_total_sum();
    ExactSum fp_pre;
    ExactSum fp_post;
    for (std::size_t i : touched) {
        const double pre_t = sc.pre_cell_t(i);
        const double c_post = mix_cover(sc.c_pre().value(i), f[i], config.c_bare);
        const double post_t = (sc.base().value(i) * c_post) * ha;
        post.add(-pre_t);
        post.add(post_t);
        fp_pre.add(pre_t);
        fp_post.add(post_t);
        f[i] = -1.0;
    }
    IterationResult r;
    r.run_index = run_index;
    r.pre_total_t = sc.pre_total_t();
    r.post_total_t = post.value();
    r.union_area_ha = static_cast<double>(touched.size()) * ha;
    r.footprint_pre_t = fp_pre.value();
    r.footprint_post_t = fp_post.value();
    return r;
}

struct IterationOutcome {
    IterationResult result;
    std::vector<double> areas_km2;
};

inline IterationOutcome run_iteration(const Scenario& sc, const SimulationConfig& config, std::uint64_t run_index,
                                      IterationWorkspace& ws) {
    try {
        const auto events = draw_events(sc, config, run_index);
        IterationOutcome out;
        out.result = accumulate(sc, config, run_index, events, ws);
        out.areas_km2.reserve(events.size());
        for (const auto& ev : events) {
            out.areas_km2.push_back(ev.area_km2);
        }
        return out;
    } catch (const IterationError&) {
        throw;
    } catch (const Error& e) {
        throw IterationError(run_index, e.what());
    }
}

inline IterationOutcome run_iteration(const Scenario& sc, const SimulationConfig& config, std::uint64_t run_index) {
    IterationWorkspace ws(sc.header().size());
    return run_iteration(sc, config, run_index, ws);
}

/// Monte Carlo estimators over runs: the sample mean and the median.
struct SimulationSummary {
    double mean_pre_total_t = 0.0;
    double mean_post_total_t = 0.0;
    double median_pre_total_t = 0.0;
    double median_post_total_t = 0.0;
    double mean_footprint_pre_t = 0.0;
    double mean_footprint_post_t = 0.0;
    double median_footprint_pre_t = 0.0;
    double median_footprint_post_t = 0.0;
    double median_union_area_ha = 0.0;
};

struct SimulationOutput {
    std::vector<IterationResult> runs;          // indexed by run_index
    std::vector<std::vector<double>> areas_km2;  // sampled areas per run
    SimulationSummary summary;
};

template <typename Field>
std::vector<double> column(const std::vector<IterationResult>& runs, Field field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) {
        v.push_back(r.*field);
    }
    return v;
}

inline SimulationSummary summarize(const std::vector<IterationResult>& runs) {
    SimulationSummary s;
    auto pre = column(runs, &IterationResult::pre_total_t);
    auto post = column(runs, &IterationResult::post_total_t);
    auto fpre = column(runs, &IterationResult::footprint_pre_t);
    auto fpost = column(runs, &IterationResult::footprint_post_t);
    s.mean_pre_total_t = mean(pre);
    s.mean_post_total_t = mean(post);
    s.median_pre_total_t = median(std::move(pre));
    s.median_post_total_t = median(std::move(post));
    s.mean_footprint_pre_t = mean(fpre);
    s.mean_footprint_post_t = mean(fpost);
    s.median_footprint_pre_t = median(std::move(fpre));
    s.median_footprint_post_t = median(std::move(fpost));
    s.median_union_area_ha = median(column(runs, &IterationResult::union_area_ha));
    return s;
}

/// All iterations, on config.threads workers. Results are stored by run index,
/// so the output does not depend on the thread count or scheduling. On failure
/// the error of the lowest failing run is rethrown.
inline SimulationOutput run_simulation(const Scenario& sc, const SimulationConfig& config) {
    config.validate();
    const std::uint64_t n = config.n_iterations;
    SimulationOutput out;
    out.runs.resize(n);
    out.areas_km2.resize(n);

    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::uint64_t err_run = n;
    std::exception_ptr err;

    auto worker = [&]() {
        IterationWorkspace ws(sc.header().size());
        for (;;) {
            const std::uint64_t run = next.fetch_add(1);
            if (run >= n) {
                return;
            }
            try {
                auto o = run_iteration(sc, config, run, ws);
                out.runs[run] = o.result;
                out.areas_km2[run] = std::move(o.areas_km2);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (run < err_run) {
                    err_run = run;
                    err = std::current_exception();
                }
            }
        }
    };

    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, n));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (err) {
        std::rethrow_exception(err);
    }
    out.summary = summarize(out.runs);
    return out;
}

}  // namespace lsero
