#include "bellcav/figures.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <map>

namespace bellcav {

FigureSpec figure_spec(int number) {
    const std::vector<double> gammas{0.0, 0.2, 0.4, 0.8};
    const std::vector<double> temperatures{0.0, 0.25, 0.5, 1.0};
    const auto fig = [](int n, const char* suffix) { return "fig" + std::to_string(n) + suffix; };
    switch (number) {
    case 1:
    case 4: {
        const SweepAxis axis = number == 1 ? SweepAxis::gamma : SweepAxis::temperature;
        return {number, axis, number == 1 ? gammas : temperatures,
                {{fig(number, "_concurrence.csv"), BellKind::phi_plus, MetricField::concurrence},
                 {fig(number, "_fidelity.csv"), BellKind::phi_plus, MetricField::fidelity}}};
    }
    case 2:
    case 5: {
        const SweepAxis axis = number == 2 ? SweepAxis::gamma : SweepAxis::temperature;
        return {number, axis, number == 2 ? gammas : temperatures,
                {{fig(number, "_concurrence.csv"), BellKind::psi_plus, MetricField::concurrence},
                 {fig(number, "_fidelity.csv"), BellKind::psi_plus, MetricField::fidelity}}};
    }
    case 3:
    case 6: {
        const SweepAxis axis = number == 3 ? SweepAxis::gamma : SweepAxis::temperature;
        return {number, axis, number == 3 ? gammas : temperatures,
                {{fig(number, "a_entropy.csv"), BellKind::psi_plus, MetricField::entropy},
                 {fig(number, "b_entropy.csv"), BellKind::phi_plus, MetricField::entropy}}};
    }
    default: throw ConfigError("figure number must be 1..6");
    }
}

namespace {

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

double field_of(const MetricSample& s, MetricField f) {
    switch (f) {
    case MetricField::concurrence: return s.concurrence;
    case MetricField::fidelity: return s.fidelity;
    case MetricField::entropy: return s.entropy;
    }
    return 0.0;
}

} // namespace

std::vector<std::string> reproduce_figure(int number, const std::string& out_dir, const ScenarioConfig& base) {
    const FigureSpec spec = figure_spec(number);
    std::filesystem::create_directories(out_dir);

    ScenarioConfig cfg = base;
    cfg.output.reset();

    std::map<BellKind, std::vector<SweepRow>> runs;
    for (const auto& panel : spec.panels) {
        if (runs.contains(panel.state)) continue;
        cfg.initial_state = panel.state;
        auto rows = sweep(cfg, spec.axis, spec.values);
        for (const auto& row : rows)
            if (!row.result)
                throw NumericalFailure("figure " + std::to_string(number) + ", " + to_string(panel.state) + " at " +
                                           format_number(row.value) + ": " + row.error,
                                       0.0);
        runs.emplace(panel.state, std::move(rows));
    }

    const std::string label = spec.axis == SweepAxis::gamma ? "gamma=" : "T=";
    std::vector<std::string> written;
    nlohmann::json events = nlohmann::json::array();
    for (const auto& panel : spec.panels) {
        const auto& rows = runs.at(panel.state);
        std::string csv = "omega_t";
        for (const auto& row : rows) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", row.value);
            csv += "," + label + buf;
        }
        csv += '\n';
        const auto& first = rows.front().result->series;
        for (std::size_t k = 0; k < first.size(); ++k) {
            csv += format_number(first[k].omega_t);
            for (const auto& row : rows) csv += ',' + format_number(field_of(row.result->series[k], panel.field));
            csv += '\n';
        }
        const std::string path = (std::filesystem::path(out_dir) / panel.file).string();
        write_text_file(path, csv);
        written.push_back(path);
    }
    for (const auto& [state, rows] : runs)
        for (const auto& row : rows) {
            nlohmann::json e = nlohmann::json::parse(events_to_json(row.result->events));
            e["state"] = to_string(state);
            e[spec.axis == SweepAxis::gamma ? "gamma" : "temperature"] = row.value;
            e["n_max"] = row.result->n_max;
            events.push_back(e);
        }
    const std::string events_path =
        (std::filesystem::path(out_dir) / ("fig" + std::to_string(number) + "_events.json")).string();
    write_text_file(events_path, events.dump(2) + "\n");
    written.push_back(events_path);
    return written;
}

} // namespace bellcav
