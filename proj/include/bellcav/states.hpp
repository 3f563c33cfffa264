// states.hpp — Bell initial states, vacuum and thermal cavity states

#pragma once

#include "bellcav/hilbert.hpp"
#include "bellcav/model.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace bellcav {

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

/// "phi+", "phi-", "psi+", "psi-"; also accepts PHI_PLUS style tags.
BellKind parse_bell_kind(std::string_view text);
std::string to_string(BellKind kind);

/// Normalized 4-vector in the basis |00>, |01>, |10>, |11>.
StateVector bell_state(BellKind kind);

/// Coefficient matrix c(a, b) of |a b> for a Bell state.
Eigen::Matrix2cd bell_coefficients(BellKind kind);

enum class BathKind { vacuum, thermal };

/// One product Fock state |m>|n> of the two cavities in the thermal mixture.
struct ThermalTerm {
    std::array<int, 2> occupations;
    double weight;
    double energy;
};

/// Boltzmann weights of mode j over the truncated space 0..n_max-1.
std::vector<double> single_mode_weights(const ModelParams& p, int j);

/// Product Fock states with weight >= cutoff_weight, renormalized to unit total
/// weight, ordered by total occupation then by mode-1 occupation. T = 0 yields
/// the single vacuum term.
std::vector<ThermalTerm> thermal_terms(const ModelParams& p, double cutoff_weight = 1e-8);

/// Smallest Fock cutoff whose discarded single-mode Boltzmann tail is below
/// tail_tolerance for both cavities; 0 at zero temperature.
int thermal_fock_cutoff(const ModelParams& p, double tail_tolerance = 1e-8);

/// rho_S(0) ⊗ rho_b(0) on [2, 2, n_max, n_max]. The thermal bath uses p.temperature.
DensityMatrix initial_density(BellKind kind, BathKind bath, const ModelParams& p, const SpaceLayout& layout,
                              double cutoff_weight = 1e-8);

} // namespace bellcav
