#include "bellcav/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace bellcav {

Method parse_method(const std::string& text) {
    if (text == "laguerre") return Method::laguerre;
    if (text == "exact") return Method::exact;
    if (text == "rk4") return Method::rk4;
    throw ConfigError("unknown method '" + text + "' (expected laguerre, exact or rk4)");
}

std::string to_string(Method m) {
    switch (m) {
    case Method::laguerre: return "laguerre";
    case Method::exact: return "exact";
    case Method::rk4: return "rk4";
    }
    return "?";
}

bool ScenarioConfig::is_closed() const {
    return bath_mode.kind == BathMode::Kind::thermal || bath_mode.gamma == 0.0;
}

void ScenarioConfig::validate() const {
    const bool thermal = bath_mode.kind == BathMode::Kind::thermal;
    if (thermal && bath_mode.gamma != 0.0)
        throw ConfigError("thermal baths require gamma = 0 (lossless cavities)");
    if (!thermal && bath_mode.temperature != 0.0)
        throw ConfigError("vacuum_leaky baths take no temperature");
    if (!(bath_mode.gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (!(bath_mode.temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
    if (n_max && *n_max < 2) throw ConfigError("n_max must be at least 2");
    if (!(cutoff_weight >= 0.0 && cutoff_weight < 1.0)) throw ConfigError("cutoff_weight must lie in [0, 1)");
    if (events.hold_window < 1) throw ConfigError("hold_window must be at least 1");
    try {
        effective_params().validate();
        grid.validate();
        laguerre.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    const Method m = effective_method();
    if (m == Method::laguerre && !is_closed())
        throw ConfigError("the Laguerre propagator is unitary; leaky cavities need rk4 or exact");
    if (m == Method::rk4 && thermal && bath_mode.temperature > 0.0)
        throw ConfigError("rk4 integrates the vacuum-bath master equation; thermal runs use laguerre or exact");
}

Method ScenarioConfig::effective_method() const {
    if (method) return *method;
    return is_closed() ? Method::laguerre : Method::rk4;
}

ModelParams ScenarioConfig::effective_params() const {
    ModelParams p = params;
    p.gamma = {bath_mode.gamma, bath_mode.gamma};
    p.temperature = bath_mode.kind == BathMode::Kind::thermal ? bath_mode.temperature * params.omega[0] : 0.0;
    if (n_max) {
        p.n_max = *n_max;
    } else {
        p.n_max = kVacuumFockCutoff;
        if (p.temperature > 0.0) p.n_max = std::max(p.n_max, thermal_fock_cutoff(p, 1e-8));
    }
    return p;
}

namespace {

BathKind bath_kind(const ScenarioConfig& cfg) {
    return cfg.bath_mode.kind == BathMode::Kind::thermal && cfg.bath_mode.temperature > 0.0 ? BathKind::thermal
                                                                                             : BathKind::vacuum;
}

Trajectory evolve_with(const ScenarioConfig& cfg, const ModelParams& p, Method m) {
    switch (m) {
    case Method::rk4: return evolve_lindblad(cfg.initial_state, p, cfg.grid, LindbladStepper::rk4, cfg.lindblad);
    case Method::exact:
        if (!cfg.is_closed())
            return evolve_lindblad(cfg.initial_state, p, cfg.grid, LindbladStepper::reference, cfg.lindblad);
        [[fallthrough]];
    case Method::laguerre: {
        ClosedOptions opts;
        opts.laguerre = cfg.laguerre;
        opts.cutoff_weight = cfg.cutoff_weight;
        return evolve_closed(cfg.initial_state, bath_kind(cfg), p, cfg.grid,
                             m == Method::exact ? ClosedMethod::exact : ClosedMethod::laguerre, opts);
    }
    }
    throw ConfigError("unknown method");
}

double max_difference(const MetricSeries& a, const MetricSeries& b) {
    double diff = 0.0;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        diff = std::max({diff, std::abs(a[k].concurrence - b[k].concurrence), std::abs(a[k].fidelity - b[k].fidelity),
                         std::abs(a[k].entropy - b[k].entropy)});
    }
    return diff;
}

std::pair<std::string, std::string> output_paths(const std::string& out) {
    const std::string ext = ".csv";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
        const std::string stem = out.substr(0, out.size() - ext.size());
        return {out, stem + ".events.json"};
    }
    return {out + ".csv", out + ".events.json"};
}

} // namespace

Trajectory evolve_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    return evolve_with(cfg, cfg.effective_params(), cfg.effective_method());
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ModelParams p = cfg.effective_params();
    const Method method = cfg.effective_method();

    struct Run {
        MetricSeries series;
        double trace_drift;
        double min_eigenvalue;
    };
    const auto run_at = [&](const ModelParams& q, Method m) {
        const Trajectory traj = evolve_with(cfg, q, m);
        return Run{evaluate_metrics(traj, cfg.initial_state, q), traj.max_trace_drift, traj.min_eigenvalue};
    };

    ScenarioResult result;
    std::optional<Run> run;
    if (cfg.validate_cutoff) {
        // Compare cutoffs N and N+4 on the factorized route, which isolates the
        // truncation error; without an explicit n_max, grow N until they agree.
        const Method cheap = method == Method::rk4 ? Method::exact : method;
        Run current = run_at(p, cheap);
        for (;;) {
            ModelParams larger = p;
            larger.n_max += 4;
            Run wide = run_at(larger, cheap);
            result.cutoff_discrepancy = max_difference(current.series, wide.series);
            if (result.cutoff_discrepancy <= cfg.cutoff_agreement) break;
            if (cfg.n_max || larger.n_max > kMaxAutoFockCutoff)
                throw NumericalFailure("Fock cutoff n_max=" + std::to_string(p.n_max) +
                                           " disagrees with n_max+4 by " + std::to_string(result.cutoff_discrepancy),
                                       result.cutoff_discrepancy);
            p = larger;
            current = std::move(wide);
        }
        if (cheap == method) run = std::move(current);
    }
    if (!run) run = run_at(p, method);

    result.n_max = p.n_max;
    result.series = std::move(run->series);
    result.max_trace_drift = run->trace_drift;
    result.min_eigenvalue = run->min_eigenvalue;

    result.events = detect_events(result.series, cfg.events);

    if (cfg.output) {
        const auto [csv, json] = output_paths(*cfg.output);
        write_text_file(csv, series_to_csv(result.series));
        write_text_file(json, events_to_json(result.events));
    }
    return result;
}

std::optional<double> first_esd_time(const MetricSeries& series, double zero_band, int hold_window) {
    if (series.empty()) throw InvalidInput("first_esd_time: empty series");
    if (hold_window < 1) throw InvalidInput("first_esd_time: hold_window must be >= 1");
    const std::size_t hold = static_cast<std::size_t>(hold_window);
    std::size_t run = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        run = series[k].concurrence < zero_band ? run + 1 : 0;
        if (run == hold) return series[k + 1 - hold].omega_t;
    }
    return std::nullopt;
}

std::vector<std::size_t> extremum_indices(const std::vector<double>& values, ExtremumKind kind, double min_prominence) {
    std::vector<double> x = values;
    if (kind == ExtremumKind::valleys)
        for (double& v : x) v = -v;
    const std::size_t n = x.size();
    std::vector<std::size_t> out;
    if (n < 3) return out;

    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(x[i - 1] < x[i])) {
            ++i;
            continue;
        }
        // Plateaus count once, at their midpoint.
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 < n && x[j + 1] < x[i]) {
            const std::size_t peak = (i + j) / 2;
            double left_min = x[peak];
            for (std::size_t k = i; k-- > 0;) {
                if (x[k] > x[peak]) break;
                left_min = std::min(left_min, x[k]);
            }
            double right_min = x[peak];
            for (std::size_t k = j + 1; k < n; ++k) {
                if (x[k] > x[peak]) break;
                right_min = std::min(right_min, x[k]);
            }
            if (x[peak] - std::max(left_min, right_min) >= min_prominence) out.push_back(peak);
        }
        i = j + 1;
    }
    return out;
}

namespace {

std::vector<double> field_values(const MetricSeries& series, MetricField field) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& s : series) {
        switch (field) {
        case MetricField::concurrence: v.push_back(s.concurrence); break;
        case MetricField::fidelity: v.push_back(s.fidelity); break;
        case MetricField::entropy: v.push_back(s.entropy); break;
        }
    }
    return v;
}

} // namespace

std::vector<double> find_extrema(const MetricSeries& series, MetricField field, ExtremumKind kind,
                                 double min_prominence) {
    if (series.size() < 3) throw InvalidInput("find_extrema: need at least three samples");
    std::vector<double> times;
    for (std::size_t k : extremum_indices(field_values(series, field), kind, min_prominence))
        times.push_back(series[k].omega_t);
    return times;
}

EventReport detect_events(const MetricSeries& series, const EventSettings& settings) {
    EventReport report;
    report.first_esd_time = first_esd_time(series, settings.zero_band, settings.hold_window);
    if (report.first_esd_time) {
        for (const auto& s : series)
            if (s.omega_t > *report.first_esd_time) report.revival_peak = std::max(report.revival_peak, s.concurrence);
        report.revival_flag = report.revival_peak > settings.revival_threshold;
    }
    if (series.size() >= 3) {
        const auto fid = field_values(series, MetricField::fidelity);
        for (std::size_t k : extremum_indices(fid, ExtremumKind::peaks, settings.min_prominence)) {
            report.peak_times.push_back(series[k].omega_t);
            report.peak_values.push_back(fid[k]);
        }
        report.valley_times = find_extrema(series, MetricField::entropy, ExtremumKind::valleys, settings.min_prominence);
    }
    return report;
}

ScenarioConfig sweep_config(const ScenarioConfig& base, SweepAxis axis, double value) {
    ScenarioConfig cfg = base;
    cfg.bath_mode = axis == SweepAxis::gamma ? BathMode::leaky(value) : BathMode::thermal(value);
    // Methods tied to the other bath kind fall back to the defaults.
    if (cfg.method) {
        if (*cfg.method == Method::laguerre && !cfg.is_closed()) cfg.method.reset();
        else if (*cfg.method == Method::rk4 && axis == SweepAxis::temperature && value > 0.0) cfg.method.reset();
    }
    if (base.output) {
        char suffix[64];
        std::snprintf(suffix, sizeof suffix, "_%s%g", axis == SweepAxis::gamma ? "gamma" : "T", value);
        cfg.output = *base.output + suffix;
    }
    return cfg;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("BELLCAV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values) {
    if (values.empty()) throw InvalidInput("sweep: no values");
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) rows.push_back({v, sweep_config(base, axis, v), std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            try {
                rows[k].result = run_scenario(rows[k].config);
            } catch (const std::exception& e) {
                rows[k].error = e.what();
            }
        }
    };
    const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(rows.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

} // namespace bellcav
