#include "bellcav/runner.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bellcav {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    return j;
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return j.get<int>();
}

bool boolean(const json& j, const std::string& key) {
    if (!j.is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
    return j.get<bool>();
}

// A scalar applies to both subsystems.
std::array<double, 2> pair(const json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("'" + key + "' must be a number or a pair of numbers");
}

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // drop negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

} // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    require_object(root, "scenario");
    reject_unknown(root,
                   {"initial_state", "bath_mode", "params", "grid", "method", "laguerre", "lindblad", "cutoff_weight",
                    "validate_cutoff", "cutoff_agreement", "events", "output"},
                   "scenario");

    ScenarioConfig cfg;
    try {
        if (root.contains("initial_state")) {
            if (!root["initial_state"].is_string()) throw ConfigError("'initial_state' must be a string");
            cfg.initial_state = parse_bell_kind(root["initial_state"].get<std::string>());
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }

    if (root.contains("bath_mode")) {
        const json& b = require_object(root["bath_mode"], "bath_mode");
        reject_unknown(b, {"kind", "gamma", "temperature"}, "bath_mode");
        const std::string kind = b.value("kind", std::string("vacuum_leaky"));
        if (kind == "vacuum_leaky") {
            if (b.contains("temperature")) throw ConfigError("vacuum_leaky baths take no temperature");
            cfg.bath_mode = BathMode::leaky(b.contains("gamma") ? number(b["gamma"], "gamma") : 0.0);
        } else if (kind == "thermal") {
            if (b.contains("gamma") && number(b["gamma"], "gamma") != 0.0)
                throw ConfigError("thermal baths require gamma = 0 (lossless cavities)");
            cfg.bath_mode = BathMode::thermal(b.contains("temperature") ? number(b["temperature"], "temperature") : 0.0);
        } else {
            throw ConfigError("bath_mode.kind must be 'vacuum_leaky' or 'thermal'");
        }
    }

    if (root.contains("params")) {
        const json& p = require_object(root["params"], "params");
        reject_unknown(p, {"omega", "epsilon", "g", "n_max", "flip_qubit_basis"}, "params");
        if (p.contains("omega")) cfg.params.omega = pair(p["omega"], "omega");
        if (p.contains("epsilon")) cfg.params.epsilon = pair(p["epsilon"], "epsilon");
        if (p.contains("g")) cfg.params.g = pair(p["g"], "g");
        if (p.contains("n_max")) cfg.n_max = integer(p["n_max"], "n_max");
        if (p.contains("flip_qubit_basis")) cfg.params.flip_qubit_basis = boolean(p["flip_qubit_basis"], "flip_qubit_basis");
    }

    if (root.contains("grid")) {
        const json& g = require_object(root["grid"], "grid");
        reject_unknown(g, {"t_max", "dt"}, "grid");
        const double t_max = g.contains("t_max") ? number(g["t_max"], "t_max") : cfg.grid.t_max;
        const double dt = g.contains("dt") ? number(g["dt"], "dt") : cfg.grid.dt;
        try {
            cfg.grid = TimeGrid::uniform(t_max, dt);
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
    }

    if (root.contains("method")) {
        if (!root["method"].is_string()) throw ConfigError("'method' must be a string");
        cfg.method = parse_method(root["method"].get<std::string>());
    }

    if (root.contains("laguerre")) {
        const json& l = require_object(root["laguerre"], "laguerre");
        reject_unknown(l, {"alpha", "k_max", "step", "tolerance"}, "laguerre");
        if (l.contains("alpha")) cfg.laguerre.alpha = number(l["alpha"], "alpha");
        if (l.contains("k_max")) cfg.laguerre.k_max = integer(l["k_max"], "k_max");
        if (l.contains("step")) cfg.laguerre.step = number(l["step"], "step");
        if (l.contains("tolerance")) cfg.laguerre.tolerance = number(l["tolerance"], "tolerance");
    }

    if (root.contains("lindblad")) {
        const json& l = require_object(root["lindblad"], "lindblad");
        reject_unknown(l, {"substeps", "max_halvings", "trace_drift_limit", "factorized"}, "lindblad");
        if (l.contains("substeps")) cfg.lindblad.substeps = integer(l["substeps"], "substeps");
        if (l.contains("max_halvings")) cfg.lindblad.max_halvings = integer(l["max_halvings"], "max_halvings");
        if (l.contains("trace_drift_limit"))
            cfg.lindblad.trace_drift_limit = number(l["trace_drift_limit"], "trace_drift_limit");
        if (l.contains("factorized")) cfg.lindblad.factorized = boolean(l["factorized"], "factorized");
    }

    if (root.contains("cutoff_weight")) cfg.cutoff_weight = number(root["cutoff_weight"], "cutoff_weight");
    if (root.contains("validate_cutoff")) cfg.validate_cutoff = boolean(root["validate_cutoff"], "validate_cutoff");
    if (root.contains("cutoff_agreement")) cfg.cutoff_agreement = number(root["cutoff_agreement"], "cutoff_agreement");

    if (root.contains("events")) {
        const json& e = require_object(root["events"], "events");
        reject_unknown(e, {"zero_band", "hold_window", "revival_threshold", "min_prominence"}, "events");
        if (e.contains("zero_band")) cfg.events.zero_band = number(e["zero_band"], "zero_band");
        if (e.contains("hold_window")) cfg.events.hold_window = integer(e["hold_window"], "hold_window");
        if (e.contains("revival_threshold")) cfg.events.revival_threshold = number(e["revival_threshold"], "revival_threshold");
        if (e.contains("min_prominence")) cfg.events.min_prominence = number(e["min_prominence"], "min_prominence");
    }

    if (root.contains("output")) {
        if (!root["output"].is_string()) throw ConfigError("'output' must be a string");
        cfg.output = root["output"].get<std::string>();
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json root;
    root["initial_state"] = to_string(cfg.initial_state);
    if (cfg.bath_mode.kind == BathMode::Kind::thermal)
        root["bath_mode"] = {{"kind", "thermal"}, {"temperature", cfg.bath_mode.temperature}};
    else
        root["bath_mode"] = {{"kind", "vacuum_leaky"}, {"gamma", cfg.bath_mode.gamma}};
    json params = {{"omega", cfg.params.omega},
                   {"epsilon", cfg.params.epsilon},
                   {"g", cfg.params.g},
                   {"flip_qubit_basis", cfg.params.flip_qubit_basis}};
    if (cfg.n_max) params["n_max"] = *cfg.n_max;
    root["params"] = params;
    root["grid"] = {{"t_max", cfg.grid.t_max}, {"dt", cfg.grid.dt}};
    if (cfg.method) root["method"] = to_string(*cfg.method);
    root["laguerre"] = {{"alpha", cfg.laguerre.alpha},
                        {"k_max", cfg.laguerre.k_max},
                        {"step", cfg.laguerre.step},
                        {"tolerance", cfg.laguerre.tolerance}};
    root["lindblad"] = {{"substeps", cfg.lindblad.substeps},
                        {"max_halvings", cfg.lindblad.max_halvings},
                        {"trace_drift_limit", cfg.lindblad.trace_drift_limit},
                        {"factorized", cfg.lindblad.factorized}};
    root["cutoff_weight"] = cfg.cutoff_weight;
    root["validate_cutoff"] = cfg.validate_cutoff;
    root["cutoff_agreement"] = cfg.cutoff_agreement;
    root["events"] = {{"zero_band", cfg.events.zero_band},
                      {"hold_window", cfg.events.hold_window},
                      {"revival_threshold", cfg.events.revival_threshold},
                      {"min_prominence", cfg.events.min_prominence}};
    if (cfg.output) root["output"] = *cfg.output;
    return root.dump(2);
}

std::string series_to_csv(const MetricSeries& series) {
    std::string out = "omega_t,concurrence,fidelity,entropy\n";
    for (const auto& s : series) {
        out += format_number(s.omega_t) + ',' + format_number(s.concurrence) + ',' + format_number(s.fidelity) + ',' +
               format_number(s.entropy) + '\n';
    }
    return out;
}

std::string events_to_json(const EventReport& events) {
    json j;
    j["first_esd_time"] = events.first_esd_time ? json(*events.first_esd_time) : json(nullptr);
    j["revival_flag"] = events.revival_flag;
    j["revival_peak"] = events.revival_peak;
    j["peak_times"] = events.peak_times;
    j["peak_values"] = events.peak_values;
    j["valley_times"] = events.valley_times;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

} // namespace bellcav
