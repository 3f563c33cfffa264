// propagators.hpp — unitary and dissipative time evolution of the two-atom system

#pragma once

#include "bellcav/hilbert.hpp"
#include "bellcav/model.hpp"
#include "bellcav/states.hpp"

#include <vector>

namespace bellcav {

/// Laguerre-series propagator settings.
///
/// exp(-iHt) = (1+it)^-(alpha+1) sum_k (it/(1+it))^k L^alpha_k(H), evaluated by
/// the three-term recurrence on vectors. Long times are split into sub-steps of
/// at most `step` (physical time units, i.e. the units of 1/omega).
struct LaguerreConfig {
    double alpha = 0.0;
    int k_max = 64;
    double step = 0.25;  // 0.1 on the omega t axis for omega = 0.4
    double tolerance = 1e-12;

    void validate() const;
};

/// U(t) v with U(t) = exp(-iHt).
StateVector laguerre_apply(const OperatorMatrix& h, double t, const StateVector& v, const LaguerreConfig& cfg = {});

/// U(t) applied to every column of `block`.
Matrix laguerre_apply(const OperatorMatrix& h, double t, const Matrix& block, const LaguerreConfig& cfg = {});

/// U(t) as a matrix, from the series applied to the identity.
OperatorMatrix laguerre_propagator(const OperatorMatrix& h, double t, const LaguerreConfig& cfg = {});

/// V diag(exp(-i lambda t)) V^dag.
OperatorMatrix exact_propagator(const OperatorMatrix& h, double t);

/// Uniform grid on the omega_1 t axis: times k*dt for k = 0..count-1.
struct TimeGrid {
    double t_max = 40.0;
    double dt = 0.032;
    int count = 1251;

    static TimeGrid uniform(double t_max, double dt);
    double time(int k) const { return k * dt; }
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;  // omega_1 t
    std::vector<Matrix> reduced_states;
    /// Worst |Tr rho - 1| seen (full state for joint integration, rho_S otherwise).
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    double max_hermiticity_error = 0.0;
};

enum class ClosedMethod { laguerre, exact };
enum class LindbladStepper { rk4, reference };

struct ClosedOptions {
    LaguerreConfig laguerre{};
    /// Evolve each atom–cavity pair separately with U_1 ⊗ U_2; false uses the full space.
    bool factorized = true;
    double cutoff_weight = 1e-8;
};

/// Unitary evolution of Bell ⊗ (vacuum | thermal) cavities; requires gamma = 0.
Trajectory evolve_closed(BellKind kind, BathKind bath, const ModelParams& p, const TimeGrid& grid,
                         ClosedMethod method, const ClosedOptions& opts = {});

struct LindbladOptions {
    /// RK4 steps per grid interval before any automatic halving.
    int substeps = 4;
    int max_halvings = 4;
    double trace_drift_limit = 1e-6;
    /// rk4 only: integrate each atom–cavity pair on its own; false uses the joint space.
    bool factorized = true;
};

/// Photon-loss master equation with both cavities starting in vacuum.
///
/// The two generators act on disjoint factors and commute, so the joint state
/// is fixed by the four operator blocks |a,0><c,0| of each pair. `rk4`
/// integrates those blocks (or, with factorized = false, the joint
/// [2, 2, N, N] density matrix); `reference` steps them with the exact
/// exponential of the local generator.
Trajectory evolve_lindblad(BellKind kind, const ModelParams& p, const TimeGrid& grid, LindbladStepper stepper,
                           const LindbladOptions& opts = {});

/// One classic RK4 step of size h.
Matrix rk4_step(const LindbladGenerator& gen, const Matrix& rho, double h);

/// RK4 from 0 to t with steps no larger than max_step.
Matrix rk4_propagate(const LindbladGenerator& gen, Matrix rho, double t, double max_step);

} // namespace bellcav
