#include "bellcav/states.hpp"

#include <algorithm>
#include <cmath>

namespace bellcav {

BellKind parse_bell_kind(std::string_view text) {
    if (text == "phi+" || text == "PHI_PLUS") return BellKind::phi_plus;
    if (text == "phi-" || text == "PHI_MINUS") return BellKind::phi_minus;
    if (text == "psi+" || text == "PSI_PLUS") return BellKind::psi_plus;
    if (text == "psi-" || text == "PSI_MINUS") return BellKind::psi_minus;
    throw InvalidInput("unknown Bell state '" + std::string(text) + "'");
}

std::string to_string(BellKind kind) {
    switch (kind) {
    case BellKind::phi_plus: return "phi+";
    case BellKind::phi_minus: return "phi-";
    case BellKind::psi_plus: return "psi+";
    case BellKind::psi_minus: return "psi-";
    }
    return "?";
}

Eigen::Matrix2cd bell_coefficients(BellKind kind) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd c = Eigen::Matrix2cd::Zero();
    switch (kind) {
    case BellKind::phi_plus: c(0, 0) = r; c(1, 1) = r; break;
    case BellKind::phi_minus: c(0, 0) = r; c(1, 1) = -r; break;
    case BellKind::psi_plus: c(0, 1) = r; c(1, 0) = r; break;
    case BellKind::psi_minus: c(0, 1) = r; c(1, 0) = -r; break;
    }
    return c;
}

StateVector bell_state(BellKind kind) {
    const Eigen::Matrix2cd c = bell_coefficients(kind);
    Vector v(4);
    v << c(0, 0), c(0, 1), c(1, 0), c(1, 1);
    return {v};
}

std::vector<double> single_mode_weights(const ModelParams& p, int j) {
    p.validate();
    std::vector<double> w(static_cast<std::size_t>(p.n_max), 0.0);
    if (p.temperature == 0.0) {
        w[0] = 1.0;
        return w;
    }
    const double energy = p.mode_frequency(j);
    double z = 0.0;
    for (int m = 0; m < p.n_max; ++m) {
        w[static_cast<std::size_t>(m)] = std::exp(-energy * m / p.temperature);
        z += w[static_cast<std::size_t>(m)];
    }
    for (double& x : w) x /= z;
    return w;
}

std::vector<ThermalTerm> thermal_terms(const ModelParams& p, double cutoff_weight) {
    p.validate();
    if (!(cutoff_weight >= 0.0 && cutoff_weight < 1.0)) throw InvalidInput("thermal_terms: cutoff_weight must lie in [0, 1)");
    if (p.temperature == 0.0) return {ThermalTerm{{0, 0}, 1.0, 0.0}};

    const auto w1 = single_mode_weights(p, 1);
    const auto w2 = single_mode_weights(p, 2);
    std::vector<ThermalTerm> terms;
    double total = 0.0;
    for (int m = 0; m < p.n_max; ++m)
        for (int n = 0; n < p.n_max; ++n) {
            const double w = w1[static_cast<std::size_t>(m)] * w2[static_cast<std::size_t>(n)];
            if (w < cutoff_weight) continue;
            terms.push_back({{m, n}, w, p.mode_frequency(1) * m + p.mode_frequency(2) * n});
            total += w;
        }
    for (auto& t : terms) t.weight /= total;
    std::stable_sort(terms.begin(), terms.end(), [](const ThermalTerm& a, const ThermalTerm& b) {
        const int sa = a.occupations[0] + a.occupations[1];
        const int sb = b.occupations[0] + b.occupations[1];
        return sa != sb ? sa < sb : a.occupations[0] < b.occupations[0];
    });
    return terms;
}

int thermal_fock_cutoff(const ModelParams& p, double tail_tolerance) {
    p.validate();
    if (p.temperature == 0.0) return 0;
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) throw InvalidInput("thermal_fock_cutoff: bad tolerance");
    int cutoff = 0;
    for (int j = 1; j <= 2; ++j) {
        // Untruncated occupation tail beyond N is x^N with x = exp(-E/T).
        const double log_x = -p.mode_frequency(j) / p.temperature;
        cutoff = std::max(cutoff, static_cast<int>(std::ceil(std::log(tail_tolerance) / log_x)));
    }
    return cutoff;
}

DensityMatrix initial_density(BellKind kind, BathKind bath, const ModelParams& p, const SpaceLayout& layout,
                              double cutoff_weight) {
    p.validate();
    if (layout != SpaceLayout::atoms_and_modes(p.n_max)) throw InvalidInput("initial_density: layout mismatch");
    const int n = p.n_max;
    Matrix bath_rho = Matrix::Zero(n * n, n * n);
    if (bath == BathKind::vacuum) {
        bath_rho(0, 0) = 1.0;
    } else {
        for (const auto& t : thermal_terms(p, cutoff_weight)) {
            const int idx = t.occupations[0] * n + t.occupations[1];
            bath_rho(idx, idx) = t.weight;
        }
    }
    const OperatorMatrix qubits{projector(bell_state(kind).amplitudes), true};
    return {kron(qubits, OperatorMatrix{bath_rho, true}).entries};
}

} // namespace bellcav
