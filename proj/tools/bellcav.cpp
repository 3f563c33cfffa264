// bellcav — command-line front end: run, sweep, figure, verify

#include "bellcav/figures.hpp"
#include "bellcav/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ScenarioFlags {
    std::string config;
    std::string state;
    std::optional<double> gamma;
    std::optional<double> temperature;
    std::optional<int> nmax;
    std::optional<double> tmax;
    std::optional<double> dt;
    std::optional<double> alpha;
    std::string method;
    std::string out;
    bool flip = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool with_bath, bool with_state) {
    cmd->add_option("--config", f.config, "Scenario JSON file; flags override its values");
    if (with_state) cmd->add_option("--state", f.state, "Initial Bell state")->check(CLI::IsMember({"phi+", "psi+", "phi-", "psi-"}));
    if (with_bath) {
        auto* g = cmd->add_option("--gamma", f.gamma, "Cavity leakage rate (vacuum cavities)");
        auto* t = cmd->add_option("--temperature", f.temperature, "Bath temperature in units of omega (lossless cavities)");
        g->excludes(t);
    }
    cmd->add_option("--nmax", f.nmax, "Fock cutoff per cavity");
    cmd->add_option("--tmax", f.tmax, "Final omega*t");
    cmd->add_option("--dt", f.dt, "Grid spacing in omega*t");
    cmd->add_option("--alpha", f.alpha, "Laguerre family parameter");
    cmd->add_option("--method", f.method, "Propagator")->check(CLI::IsMember({"laguerre", "exact", "rk4"}));
    cmd->add_flag("--flip-qubit-basis", f.flip, "Let sigma_z raise index 1 instead of index 0");
}

bellcav::ScenarioConfig build_config(const ScenarioFlags& f) {
    using namespace bellcav;
    ScenarioConfig cfg = f.config.empty() ? ScenarioConfig{} : load_scenario_file(f.config);
    if (!f.state.empty()) cfg.initial_state = parse_bell_kind(f.state);
    if (f.gamma) cfg.bath_mode = BathMode::leaky(*f.gamma);
    if (f.temperature) cfg.bath_mode = BathMode::thermal(*f.temperature);
    if (f.nmax) cfg.n_max = *f.nmax;
    if (f.tmax || f.dt) cfg.grid = TimeGrid::uniform(f.tmax.value_or(cfg.grid.t_max), f.dt.value_or(cfg.grid.dt));
    if (f.alpha) cfg.laguerre.alpha = *f.alpha;
    if (!f.method.empty()) cfg.method = parse_method(f.method);
    if (f.flip) cfg.params.flip_qubit_basis = true;
    if (!f.out.empty()) cfg.output = f.out;
    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw bellcav::ConfigError("bad sweep value '" + item + "'");
        }
    }
    if (values.empty()) throw bellcav::ConfigError("--values needs at least one number");
    return values;
}

std::string esd_text(const bellcav::EventReport& e) {
    if (!e.first_esd_time) return "none";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *e.first_esd_time);
    return buf;
}

int cmd_run(const ScenarioFlags& flags) {
    const bellcav::ScenarioConfig cfg = build_config(flags);
    const bellcav::ScenarioResult result = bellcav::run_scenario(cfg);
    if (!cfg.output) std::cout << bellcav::series_to_csv(result.series);
    std::cerr << "n_max=" << result.n_max << " first_esd=" << esd_text(result.events)
              << " trace_drift=" << result.max_trace_drift << " cutoff_discrepancy=" << result.cutoff_discrepancy << "\n";
    return 0;
}

int cmd_sweep(const ScenarioFlags& flags, const std::string& axis, const std::string& values_text) {
    const bellcav::ScenarioConfig cfg = build_config(flags);
    const auto values = parse_values(values_text);
    const auto rows = bellcav::sweep(cfg, axis == "gamma" ? bellcav::SweepAxis::gamma : bellcav::SweepAxis::temperature,
                                     values);
    bool failed = false;
    std::cout << axis << ",first_esd_time,revival_flag,fidelity_peaks,status\n";
    for (const auto& row : rows) {
        std::cout << row.value << ',';
        if (row.result) {
            std::cout << esd_text(row.result->events) << ',' << (row.result->events.revival_flag ? "true" : "false")
                      << ',' << row.result->events.peak_times.size() << ",ok\n";
        } else {
            failed = true;
            std::cout << ",,,\"" << row.error << "\"\n";
        }
    }
    return failed ? kExitNumerical : 0;
}

int cmd_figure(const ScenarioFlags& flags, int number, const std::string& dir) {
    ScenarioFlags f = flags;
    f.out.clear();
    const auto start = std::chrono::steady_clock::now();
    const auto written = bellcav::reproduce_figure(number, dir, build_config(f));
    for (const auto& path : written) std::cout << path << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "figure " << number << " done in " << secs << " s\n";
    return 0;
}

int cmd_verify() {
    bool ok = true;
    for (const auto& c : bellcav::run_verification()) {
        std::printf("%-4s %-52s %.3e (limit %.1e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.threshold);
        ok = ok && c.passed;
    }
    return ok ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell-state dynamics of two atoms in separate leaky or thermal cavities"};
    app.require_subcommand(1, 1);

    ScenarioFlags run_flags;
    auto* run = app.add_subcommand("run", "Run one scenario");
    add_scenario_flags(run, run_flags, true, true);
    run->add_option("--out", run_flags.out, "Output path (CSV plus .events.json); stdout when absent");

    ScenarioFlags sweep_flags;
    std::string axis = "gamma";
    std::string values;
    auto* sw = app.add_subcommand("sweep", "Sweep gamma or temperature");
    add_scenario_flags(sw, sweep_flags, false, true);
    sw->add_option("--axis", axis, "Sweep axis")->check(CLI::IsMember({"gamma", "temperature"}));
    sw->add_option("--values", values, "Comma-separated values (temperature in units of omega)")->required();
    sw->add_option("--out", sweep_flags.out, "Output prefix for per-row CSV and events files");

    ScenarioFlags fig_flags;
    int figure = 0;
    std::string fig_dir = ".";
    auto* fig = app.add_subcommand("figure", "Reproduce the data behind figure 1..6");
    fig->add_option("number", figure, "Figure number")->required()->check(CLI::Range(1, 6));
    add_scenario_flags(fig, fig_flags, false, false);
    fig->add_option("--out", fig_dir, "Output directory");

    auto* verify = app.add_subcommand("verify", "Run the oracle cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (sw->parsed()) return cmd_sweep(sweep_flags, axis, values);
        if (fig->parsed()) return cmd_figure(fig_flags, figure, fig_dir);
        if (verify->parsed()) return cmd_verify();
    } catch (const bellcav::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bellcav::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
