// metrics.hpp — concurrence, fidelity and entropy of the reduced two-qubit state

#pragma once

#include "bellcav/hilbert.hpp"
#include "bellcav/model.hpp"
#include "bellcav/propagators.hpp"
#include "bellcav/states.hpp"

#include <vector>

namespace bellcav {

struct MetricSample {
    double omega_t;
    double concurrence;
    double fidelity;
    double entropy;  // bits
};

using MetricSeries = std::vector<MetricSample>;

/// Wootters concurrence from the Hermitian form sqrt(rho) Y rho* Y sqrt(rho),
/// Y = sy ⊗ sy, complex conjugation in the computational basis.
double concurrence(const Matrix& rho);

/// Same quantity from the eigenvalues of the non-Hermitian product rho Y rho* Y.
double concurrence_direct(const Matrix& rho);

/// exp(-i H_S t)|psi(0)><psi(0)|exp(i H_S t) at physical time t.
Matrix ideal_evolution(BellKind kind, const ModelParams& p, double t);

/// Overlap Tr[rho_ideal rho_s].
double fidelity(const Matrix& rho_s, const Matrix& rho_ideal);

/// -Tr rho log2 rho. Rejects states with an eigenvalue below -1e-6.
double entropy_exchange(const Matrix& rho_s);

/// Transpose on the second qubit of a two-qubit matrix.
Matrix partial_transpose(const Matrix& rho);

/// Metrics at every trajectory sample, with the ideal state of the initial Bell kind.
MetricSeries evaluate_metrics(const Trajectory& traj, BellKind kind, const ModelParams& p);

} // namespace bellcav
