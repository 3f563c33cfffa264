// runner.hpp — scenarios, event detection and parameter sweeps

#pragma once

#include "bellcav/metrics.hpp"
#include "bellcav/model.hpp"
#include "bellcav/propagators.hpp"
#include "bellcav/states.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bellcav {

/// Raised for malformed or inconsistent scenario configurations.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

enum class Method { laguerre, exact, rk4 };

Method parse_method(const std::string& text);
std::string to_string(Method m);

/// Either leaky cavities starting in vacuum, or lossless cavities in a thermal state.
struct BathMode {
    enum class Kind { vacuum_leaky, thermal } kind = Kind::vacuum_leaky;
    double gamma = 0.0;
    /// In units of omega_1, e.g. 0.25 for T = 0.25 omega.
    double temperature = 0.0;

    static BathMode leaky(double gamma) { return {Kind::vacuum_leaky, gamma, 0.0}; }
    static BathMode thermal(double temperature) { return {Kind::thermal, 0.0, temperature}; }
};

struct EventSettings {
    double zero_band = 1e-6;
    int hold_window = 8;
    double revival_threshold = 0.05;
    double min_prominence = 0.02;
};

struct ScenarioConfig {
    BellKind initial_state = BellKind::phi_plus;
    BathMode bath_mode{};
    /// gamma and temperature inside are overwritten from bath_mode.
    ModelParams params{};
    /// Unset: Fock cutoff chosen by the tail-weight policy, then grown in
    /// steps of 4 until the n_max + 4 check agrees.
    std::optional<int> n_max;
    TimeGrid grid{};
    /// Unset: laguerre for unitary runs, rk4 for leaky ones.
    std::optional<Method> method;
    LaguerreConfig laguerre{};
    LindbladOptions lindblad{};
    double cutoff_weight = 1e-8;
    /// Re-run the factorized route at n_max + 4 and require agreement.
    bool validate_cutoff = true;
    double cutoff_agreement = 1e-6;
    EventSettings events{};
    /// Writes <output>.csv and <output>.events.json when set.
    std::optional<std::string> output;

    void validate() const;
    bool is_closed() const;
    Method effective_method() const;
    /// Params with bath gamma / temperature and the chosen cutoff applied.
    ModelParams effective_params() const;
};

/// Fock cutoff floor for vacuum-initialized cavities.
inline constexpr int kVacuumFockCutoff = 8;
/// Ceiling for automatic cutoff growth when n_max is not given explicitly.
inline constexpr int kMaxAutoFockCutoff = 80;

struct EventReport {
    std::optional<double> first_esd_time;
    bool revival_flag = false;
    /// Largest concurrence after the first sudden death.
    double revival_peak = 0.0;
    std::vector<double> peak_times;    // fidelity peaks
    std::vector<double> peak_values;
    std::vector<double> valley_times;  // entropy valleys
};

struct ScenarioResult {
    MetricSeries series;
    EventReport events;
    int n_max = 0;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    /// Max metric difference against n_max + 4; negative when not checked.
    double cutoff_discrepancy = -1.0;
};

/// Evolve, evaluate metrics on every grid point, detect events, write outputs.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Trajectory of a scenario without metrics or outputs.
Trajectory evolve_scenario(const ScenarioConfig& cfg);

/// Earliest grid time where concurrence < zero_band for hold_window consecutive samples.
std::optional<double> first_esd_time(const MetricSeries& series, double zero_band = 1e-6, int hold_window = 8);

enum class MetricField { concurrence, fidelity, entropy };
enum class ExtremumKind { peaks, valleys };

/// Indices of local extrema whose topographic prominence is at least min_prominence.
std::vector<std::size_t> extremum_indices(const std::vector<double>& values, ExtremumKind kind, double min_prominence);

/// Grid times of extrema of one metric, increasing.
std::vector<double> find_extrema(const MetricSeries& series, MetricField field, ExtremumKind kind,
                                 double min_prominence = 0.02);

EventReport detect_events(const MetricSeries& series, const EventSettings& settings = {});

enum class SweepAxis { gamma, temperature };

struct SweepRow {
    double value;
    ScenarioConfig config;
    std::optional<ScenarioResult> result;
    std::string error;
};

/// Base config with the bath switched to the given axis value.
ScenarioConfig sweep_config(const ScenarioConfig& base, SweepAxis axis, double value);

/// One row per value in order; rows run concurrently (BELLCAV_THREADS caps the
/// worker count) and failures are recorded per row.
std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values);

/// Worker count from BELLCAV_THREADS, else hardware concurrency.
unsigned worker_threads();

// I/O

ScenarioConfig parse_scenario_json(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Header omega_t,concurrence,fidelity,entropy; 9 significant digits.
std::string series_to_csv(const MetricSeries& series);
std::string events_to_json(const EventReport& events);
void write_text_file(const std::string& path, const std::string& text);

} // namespace bellcav
