// figures.hpp — data behind the six reference figures, and the oracle self-check

#pragma once

#include "bellcav/runner.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bellcav {

struct FigurePanel {
    std::string file;  // e.g. fig1_concurrence.csv
    BellKind state;
    MetricField field;
};

/// Figures 1-3 sweep gamma in {0, 0.2, 0.4, 0.8} with vacuum cavities;
/// figures 4-6 sweep T in {0, 0.25, 0.5, 1.0} omega with lossless cavities.
struct FigureSpec {
    int number;
    SweepAxis axis;
    std::vector<double> values;
    std::vector<FigurePanel> panels;
};

FigureSpec figure_spec(int number);

/// Writes one CSV per panel (columns omega_t then one per curve) and
/// figN_events.json into out_dir. Returns the written paths.
std::vector<std::string> reproduce_figure(int number, const std::string& out_dir, const ScenarioConfig& base = {});

struct VerifyCheck {
    std::string name;
    double value;
    double threshold;
    bool passed;
};

/// Oracle cross-checks: Laguerre vs exact propagation, factorized vs full-space
/// evolution (closed and dissipative), concurrence vs the partial-transpose test.
std::vector<VerifyCheck> run_verification(std::uint64_t seed = 20240611);

} // namespace bellcav
