#include "bellcav/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bellcav;

namespace {

MetricSeries from_concurrence(const std::vector<double>& c) {
    MetricSeries s;
    for (std::size_t k = 0; k < c.size(); ++k) s.push_back({0.1 * static_cast<double>(k), c[k], 1.0, 0.0});
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.grid = TimeGrid::uniform(2.0, 0.032);
    cfg.n_max = 6;
    return cfg;
}

} // namespace

TEST_CASE("sudden death needs the full hold window below the zero band") {
    std::vector<double> c{1.0, 0.5, 0.1};
    c.insert(c.end(), 7, 0.0);
    c.push_back(0.2);
    CHECK_FALSE(first_esd_time(from_concurrence(c)).has_value());
    c.insert(c.begin() + 10, 1, 5e-7);  // inside the zero band
    const auto t = first_esd_time(from_concurrence(c));
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(0.3));
    CHECK(first_esd_time(from_concurrence(c), 1e-6, 3) == doctest::Approx(0.3));
    CHECK_THROWS_AS(first_esd_time(from_concurrence(c), 1e-6, 0), InvalidInput);
    CHECK_THROWS_AS(first_esd_time(MetricSeries{}), InvalidInput);
}

TEST_CASE("revival after sudden death") {
    std::vector<double> c{1.0, 0.4};
    c.insert(c.end(), 10, 0.0);
    for (double x : {0.1, 0.3, 0.2, 0.0}) c.push_back(x);
    const EventReport r = detect_events(from_concurrence(c));
    REQUIRE(r.first_esd_time.has_value());
    CHECK(*r.first_esd_time == doctest::Approx(0.2));
    CHECK(r.revival_flag);
    CHECK(r.revival_peak == doctest::Approx(0.3));

    std::vector<double> weak{1.0};
    weak.insert(weak.end(), 10, 0.0);
    weak.push_back(0.04);
    const EventReport w = detect_events(from_concurrence(weak));
    CHECK_FALSE(w.revival_flag);
    CHECK(w.revival_peak == doctest::Approx(0.04));
}

TEST_CASE("extrema match scipy.signal.find_peaks with a prominence threshold") {
    std::vector<double> x;
    for (int k = 0; k <= 600; ++k) {
        const double t = 0.05 * k;
        x.push_back(std::sin(t) + 0.3 * std::sin(3.7 * t));
    }
    // indices from scipy.signal.find_peaks(x, prominence=p)
    const std::vector<std::size_t> peaks{13, 40, 71, 115, 147, 174, 210, 252, 281, 308, 349, 387, 415, 488, 521, 548, 582};
    const std::vector<std::size_t> valleys{24, 65, 94, 122, 163, 200, 227, 258, 302, 334, 361, 396, 468, 496, 535, 574};
    const std::vector<std::size_t> tall{40, 147, 281, 415, 521};
    CHECK(extremum_indices(x, ExtremumKind::peaks, 0.02) == peaks);
    CHECK(extremum_indices(x, ExtremumKind::valleys, 0.02) == valleys);
    CHECK(extremum_indices(x, ExtremumKind::peaks, 0.5) == tall);
}

TEST_CASE("plateaus count once at their midpoint; edges are never extrema") {
    const std::vector<double> x{3.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0};
    CHECK(extremum_indices(x, ExtremumKind::peaks, 0.02) == std::vector<std::size_t>{3});
    CHECK(extremum_indices(x, ExtremumKind::valleys, 0.02) == std::vector<std::size_t>{1, 6});
    CHECK(extremum_indices({1.0, 2.0}, ExtremumKind::peaks, 0.0).empty());
}

TEST_CASE("scenario validation") {
    ScenarioConfig cfg;
    cfg.bath_mode = BathMode::thermal(0.5);
    cfg.bath_mode.gamma = 0.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = {};
    cfg.bath_mode = BathMode::leaky(0.2);
    cfg.method = Method::laguerre;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = {};
    cfg.bath_mode = BathMode::thermal(0.25);
    cfg.method = Method::rk4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = {};
    cfg.n_max = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = {};
    CHECK(cfg.effective_method() == Method::laguerre);
    cfg.bath_mode = BathMode::leaky(0.4);
    CHECK(cfg.effective_method() == Method::rk4);
    CHECK(cfg.effective_params().gamma[1] == 0.4);

    cfg.bath_mode = BathMode::thermal(0.25);
    const ModelParams p = cfg.effective_params();
    CHECK(p.temperature == doctest::Approx(0.1));  // temperatures are given in units of omega
    CHECK(p.n_max == 10);
    CHECK(parse_method("exact") == Method::exact);
    CHECK_THROWS_AS(parse_method("euler"), ConfigError);
}

TEST_CASE("scenario JSON parsing") {
    const ScenarioConfig cfg = parse_scenario_json(R"({
        "initial_state": "psi+",
        "bath_mode": {"kind": "thermal", "temperature": 0.5},
        "params": {"g": [0.2, 0.1], "n_max": 12},
        "grid": {"t_max": 10, "dt": 0.05},
        "method": "exact",
        "lindblad": {"factorized": false}
    })");
    CHECK(cfg.initial_state == BellKind::psi_plus);
    CHECK(cfg.bath_mode.kind == BathMode::Kind::thermal);
    CHECK(cfg.bath_mode.temperature == 0.5);
    CHECK(cfg.params.g[1] == 0.1);
    CHECK(cfg.n_max == 12);
    CHECK(cfg.grid.count == 201);
    CHECK(cfg.method == Method::exact);
    CHECK_FALSE(cfg.lindblad.factorized);

    const ScenarioConfig again = parse_scenario_json(scenario_to_json(cfg));
    CHECK(scenario_to_json(again) == scenario_to_json(cfg));

    CHECK_THROWS_AS(parse_scenario_json(R"({"bath_mode": {"kind": "thermal", "temperature": 0.5, "gamma": 0.2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"bath_mode": {"kind": "vacuum_leaky", "temperature": 0.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"gama": 0.2})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"params": {"n_max": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"initial_state": "w"})"), InvalidInput);
    CHECK_THROWS_AS(parse_scenario_json("{"), ConfigError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("run_scenario is deterministic and writes CSV and events") {
    const auto dir = std::filesystem::temp_directory_path() / "bellcav_runner_test";
    std::filesystem::create_directories(dir);
    ScenarioConfig cfg = small_config();
    cfg.bath_mode = BathMode::leaky(0.2);
    cfg.output = (dir / "leaky.csv").string();
    const ScenarioResult a = run_scenario(cfg);
    const std::string csv = slurp((dir / "leaky.csv").string());
    const std::string events = slurp((dir / "leaky.events.json").string());
    const ScenarioResult b = run_scenario(cfg);
    CHECK(slurp((dir / "leaky.csv").string()) == csv);
    CHECK(slurp((dir / "leaky.events.json").string()) == events);
    CHECK(series_to_csv(a.series) == series_to_csv(b.series));

    CHECK(csv.rfind("omega_t,concurrence,fidelity,entropy\n0,1,1,", 0) == 0);
    CHECK(a.series.front().entropy < 1e-9);
    CHECK(a.series.size() == 63);
    CHECK(a.n_max == 6);
    CHECK(a.cutoff_discrepancy >= 0.0);
    CHECK(a.cutoff_discrepancy < 1e-6);
    CHECK(events.find("\"first_esd_time\": null") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cutoff validation: explicit cutoffs fail loudly, automatic ones grow") {
    ScenarioConfig cfg = small_config();
    cfg.grid = TimeGrid::uniform(20.0, 0.032);
    cfg.n_max = 3;
    CHECK_THROWS_AS(run_scenario(cfg), NumericalFailure);

    cfg.n_max.reset();
    const ScenarioResult r = run_scenario(cfg);
    CHECK(r.n_max >= kVacuumFockCutoff);
    CHECK(r.cutoff_discrepancy <= cfg.cutoff_agreement);

    cfg.validate_cutoff = false;
    cfg.n_max = 3;
    CHECK(run_scenario(cfg).cutoff_discrepancy < 0.0);
}

TEST_CASE("sweeps keep value order, reset incompatible methods and suffix outputs") {
    ScenarioConfig base = small_config();
    base.method = Method::laguerre;
    base.output = "out/run";
    const ScenarioConfig g = sweep_config(base, SweepAxis::gamma, 0.2);
    CHECK_FALSE(g.method.has_value());
    CHECK(*g.output == "out/run_gamma0.2");
    CHECK(sweep_config(base, SweepAxis::gamma, 0.0).method == Method::laguerre);
    base.method = Method::rk4;
    const ScenarioConfig t = sweep_config(base, SweepAxis::temperature, 0.25);
    CHECK_FALSE(t.method.has_value());
    CHECK(*t.output == "out/run_T0.25");

    base = small_config();
    const auto rows = sweep(base, SweepAxis::gamma, {0.8, 0.0, -1.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 0.8);
    CHECK(rows[1].value == 0.0);
    CHECK(rows[0].result.has_value());
    CHECK(rows[1].result.has_value());
    CHECK_FALSE(rows[2].result.has_value());
    CHECK_FALSE(rows[2].error.empty());
    // the same scenario in a sweep and alone gives identical output
    ScenarioConfig alone = base;
    alone.bath_mode = BathMode::leaky(0.8);
    CHECK(series_to_csv(rows[0].result->series) == series_to_csv(run_scenario(alone).series));
}

TEST_CASE("CSV formatting") {
    const MetricSeries s{{0.0, 1.0, 1.0, -0.0}, {0.032, 0.5, 0.25, 1.0 / 3.0}};
    CHECK(series_to_csv(s) == "omega_t,concurrence,fidelity,entropy\n0,1,1,0\n0.032,0.5,0.25,0.333333333\n");
}

TEST_CASE("flipping the qubit basis is a symmetry of the Bell-state metrics") {
    for (BathMode bath : {BathMode::leaky(0.4), BathMode::thermal(0.5)}) {
        ScenarioConfig cfg = small_config();
        cfg.initial_state = bath.kind == BathMode::Kind::thermal ? BellKind::psi_plus : BellKind::phi_plus;
        cfg.bath_mode = bath;
        cfg.n_max = bath.kind == BathMode::Kind::thermal ? 23 : 8;
        cfg.validate_cutoff = false;
        const MetricSeries a = run_scenario(cfg).series;
        cfg.params.flip_qubit_basis = true;
        const MetricSeries b = run_scenario(cfg).series;
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(std::abs(a[k].concurrence - b[k].concurrence) < 1e-12);
            CHECK(std::abs(a[k].fidelity - b[k].fidelity) < 1e-12);
            CHECK(std::abs(a[k].entropy - b[k].entropy) < 1e-12);
        }
    }
}
