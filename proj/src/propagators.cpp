#include "bellcav/propagators.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace bellcav {

void LaguerreConfig::validate() const {
    if (!(alpha > -1.0)) throw InvalidInput("LaguerreConfig: alpha must exceed -1");
    if (k_max < 1) throw InvalidInput("LaguerreConfig: k_max must be >= 1");
    if (!(step > 0.0)) throw InvalidInput("LaguerreConfig: step must be positive");
    if (!(tolerance > 0.0)) throw InvalidInput("LaguerreConfig: tolerance must be positive");
}

namespace {

// Gershgorin lower bound on the spectrum of a Hermitian matrix.
double spectrum_lower_bound(const Matrix& h) {
    double lower = INFINITY;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
        lower = std::min(lower, h(i, i).real() - radius);
    }
    return std::isfinite(lower) ? lower : 0.0;
}

// One series evaluation for |tau| <= step, on a spectrum shifted to be non-negative.
Matrix laguerre_substep(const Matrix& shifted_h, double shift, double tau, const Matrix& block,
                        const LaguerreConfig& cfg) {
    const Complex i(0.0, 1.0);
    const Complex denom = 1.0 + i * tau;
    const Complex z = i * tau / denom;
    const Complex prefactor = std::pow(1.0 / denom, cfg.alpha + 1.0) * std::exp(-i * shift * tau);

    const double scale = std::max(block.norm(), 1e-300);
    Matrix prev = block;
    Matrix curr = (1.0 + cfg.alpha) * block - shifted_h * block;
    Matrix sum = block + z * curr;

    Complex zk = z;
    int small_terms = 0;
    double last_term = INFINITY;
    for (int k = 1; k < cfg.k_max; ++k) {
        // (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
        Matrix next = ((2.0 * k + 1.0 + cfg.alpha) * curr - shifted_h * curr - (k + cfg.alpha) * prev) / (k + 1.0);
        zk *= z;
        const Matrix term = zk * next;
        sum += term;
        last_term = term.norm() / scale;
        small_terms = last_term < cfg.tolerance ? small_terms + 1 : 0;
        if (small_terms >= 2) return prefactor * sum;
        prev = std::move(curr);
        curr = std::move(next);
    }
    throw NumericalFailure("laguerre_apply: series not converged at k_max=" + std::to_string(cfg.k_max) +
                               " (residual " + std::to_string(last_term) + "); reduce the sub-step",
                           last_term);
}

} // namespace

Matrix laguerre_apply(const OperatorMatrix& h, double t, const Matrix& block, const LaguerreConfig& cfg) {
    cfg.validate();
    if (!h.hermitian || hermiticity_error(h.entries) > 1e-10)
        throw InvalidInput("laguerre_apply: Hamiltonian must be Hermitian");
    if (block.rows() != h.entries.rows()) throw InvalidInput("laguerre_apply: dimension mismatch");

    const double shift = spectrum_lower_bound(h.entries);
    const Matrix shifted = h.entries - shift * Matrix::Identity(h.dim(), h.dim());

    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(t) / cfg.step - 1e-12)));
    const double tau = t / pieces;
    Matrix out = block;
    for (int s = 0; s < pieces; ++s) out = laguerre_substep(shifted, shift, tau, out, cfg);

    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        const double before = block.col(c).norm();
        const double drift = std::abs(out.col(c).norm() - before);
        if (drift > 1e-8 * std::max(before, 1.0))
            throw NumericalFailure("laguerre_apply: norm not conserved", drift);
    }
    return out;
}

StateVector laguerre_apply(const OperatorMatrix& h, double t, const StateVector& v, const LaguerreConfig& cfg) {
    return {laguerre_apply(h, t, Matrix(v.amplitudes), cfg).col(0)};
}

OperatorMatrix laguerre_propagator(const OperatorMatrix& h, double t, const LaguerreConfig& cfg) {
    return {laguerre_apply(h, t, Matrix::Identity(h.dim(), h.dim()).eval(), cfg), false};
}

OperatorMatrix exact_propagator(const OperatorMatrix& h, double t) {
    const EigenDecomposition eig = eig_hermitian(h);
    const Complex i(0.0, 1.0);
    Vector phases(eig.values.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-i * eig.values(k) * t);
    return {eig.vectors * phases.asDiagonal() * eig.vectors.adjoint(), false};
}

TimeGrid TimeGrid::uniform(double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw InvalidInput("TimeGrid: need dt > 0 and t_max >= 0");
    TimeGrid g;
    g.t_max = t_max;
    g.dt = dt;
    g.count = static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1;
    return g;
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || count < 1 || !(t_max >= 0.0)) throw InvalidInput("TimeGrid: invalid grid");
    // samples are k dt for every k with k dt <= t_max
    if (count != static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1)
        throw InvalidInput("TimeGrid: sample count does not match t_max / dt");
}

namespace {

void record(Trajectory& traj, double omega_t, Matrix rho_s) {
    const DensityDiagnostics d = diagnose(rho_s);
    traj.max_trace_drift = std::max(traj.max_trace_drift, d.trace_error);
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, d.hermiticity_error);
    traj.min_eigenvalue = traj.reduced_states.empty() ? d.min_eigenvalue : std::min(traj.min_eigenvalue, d.min_eigenvalue);
    traj.times.push_back(omega_t);
    traj.reduced_states.push_back(std::move(rho_s));
}

// Tr_mode |u><w| for vectors on [2, N]: 2x2 in the atom index.
Eigen::Matrix2cd trace_mode(const Vector& u, const Vector& w, int n) {
    const Eigen::Map<const Matrix> um(u.data(), n, 2);
    const Eigen::Map<const Matrix> wm(w.data(), n, 2);
    return um.transpose() * wm.conjugate();
}

Eigen::Matrix2cd trace_mode(const Matrix& op, int n) {
    Eigen::Matrix2cd out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out(a, b) = op.block(a * n, b * n, n, n).trace();
    return out;
}

// rho_S = sum c_ab conj(c_cd) A[a][c] ⊗ B[b][d]
template <class BlockA, class BlockB>
Matrix combine_channels(const Eigen::Matrix2cd& c, BlockA&& first, BlockB&& second) {
    Matrix rho = Matrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (c(a, b) == 0.0) continue;
            for (int cc = 0; cc < 2; ++cc)
                for (int d = 0; d < 2; ++d) {
                    if (c(cc, d) == 0.0) continue;
                    const Complex coeff = c(a, b) * std::conj(c(cc, d));
                    const Eigen::Matrix2cd x = first(a, cc);
                    const Eigen::Matrix2cd y = second(b, d);
                    for (int i = 0; i < 2; ++i)
                        for (int k = 0; k < 2; ++k)
                            for (int i2 = 0; i2 < 2; ++i2)
                                for (int k2 = 0; k2 < 2; ++k2)
                                    rho(2 * i + k, 2 * i2 + k2) += coeff * x(i, i2) * y(k, k2);
                }
        }
    return rho;
}

void require_closed(const ModelParams& p) {
    if (p.gamma[0] != 0.0 || p.gamma[1] != 0.0)
        throw InvalidInput("evolve_closed: cavity leakage must be zero for unitary evolution");
}

std::vector<ThermalTerm> bath_terms(BathKind bath, const ModelParams& p, double cutoff_weight) {
    if (bath == BathKind::vacuum) return {ThermalTerm{{0, 0}, 1.0, 0.0}};
    return thermal_terms(p, cutoff_weight);
}

// Evolves the columns |a>|m> of one atom–cavity pair for every retained m.
class LocalEvolution {
public:
    LocalEvolution(int j, const ModelParams& p, const std::vector<int>& modes, double dt, ClosedMethod method,
                   const LaguerreConfig& cfg)
        : n_(p.n_max), method_(method), h_(build_local_hamiltonian(j, p)) {
        for (std::size_t s = 0; s < modes.size(); ++s) slot_[modes[s]] = static_cast<int>(s);
        initial_ = Matrix::Zero(2 * n_, 2 * static_cast<Eigen::Index>(modes.size()));
        for (std::size_t s = 0; s < modes.size(); ++s)
            for (int a = 0; a < 2; ++a) initial_(a * n_ + modes[s], column(a, static_cast<int>(s))) = 1.0;
        if (method_ == ClosedMethod::laguerre) step_ = laguerre_propagator(h_, dt, cfg).entries;
        else eig_ = eig_hermitian(h_);
        current_ = initial_;
    }

    // Advance to physical time t (the k-th grid point for the Laguerre march).
    void advance_to(double t, bool first) {
        if (method_ == ClosedMethod::laguerre) {
            if (!first) current_ = step_ * current_;
            return;
        }
        const Complex i(0.0, 1.0);
        Vector phases(eig_.values.size());
        for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-i * eig_.values(k) * t);
        current_ = eig_.vectors * (phases.asDiagonal() * (eig_.vectors.adjoint() * initial_));
    }

    // Tr_mode U|a,m><c,m|U^dag
    Eigen::Matrix2cd reduced(int m, int a, int c) const {
        const int s = slot_.at(m);
        return trace_mode(current_.col(column(a, s)), current_.col(column(c, s)), n_);
    }

private:
    static int column(int a, int slot) { return 2 * slot + a; }

    int n_;
    ClosedMethod method_;
    OperatorMatrix h_;
    EigenDecomposition eig_;
    Matrix step_;
    Matrix initial_;
    Matrix current_;
    std::map<int, int> slot_;
};

Trajectory closed_factorized(BellKind kind, const std::vector<ThermalTerm>& terms, const ModelParams& p,
                             const TimeGrid& grid, ClosedMethod method, const LaguerreConfig& cfg) {
    std::vector<int> modes1;
    std::vector<int> modes2;
    for (const auto& t : terms) {
        modes1.push_back(t.occupations[0]);
        modes2.push_back(t.occupations[1]);
    }
    for (auto* m : {&modes1, &modes2}) {
        std::sort(m->begin(), m->end());
        m->erase(std::unique(m->begin(), m->end()), m->end());
    }
    const double dt = p.physical_time(grid.dt);
    LocalEvolution first(1, p, modes1, dt, method, cfg);
    LocalEvolution second(2, p, modes2, dt, method, cfg);
    const Eigen::Matrix2cd c = bell_coefficients(kind);

    Trajectory traj;
    for (int k = 0; k < grid.count; ++k) {
        const double t = p.physical_time(grid.time(k));
        first.advance_to(t, k == 0);
        second.advance_to(t, k == 0);
        Matrix rho = Matrix::Zero(4, 4);
        for (const auto& term : terms) {
            const int m = term.occupations[0];
            const int n = term.occupations[1];
            rho += term.weight * combine_channels(
                                     c, [&](int a, int cc) { return first.reduced(m, a, cc); },
                                     [&](int b, int d) { return second.reduced(n, b, d); });
        }
        record(traj, grid.time(k), std::move(rho));
    }
    return traj;
}

Trajectory closed_full_space(BellKind kind, const std::vector<ThermalTerm>& terms, const ModelParams& p,
                             const TimeGrid& grid, ClosedMethod method, const LaguerreConfig& cfg) {
    const SpaceLayout layout = SpaceLayout::atoms_and_modes(p.n_max);
    const OperatorMatrix h = build_total_hamiltonian(p, layout);
    const int bath_dim = p.n_max * p.n_max;
    const Vector bell = bell_state(kind).amplitudes;

    Matrix initial(layout.total_dim(), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t s = 0; s < terms.size(); ++s) {
        Vector fock = Vector::Zero(bath_dim);
        fock(terms[s].occupations[0] * p.n_max + terms[s].occupations[1]) = 1.0;
        initial.col(static_cast<Eigen::Index>(s)) = kron(bell, fock);
    }

    Matrix step;
    EigenDecomposition eig;
    if (method == ClosedMethod::laguerre) step = laguerre_propagator(h, p.physical_time(grid.dt), cfg).entries;
    else eig = eig_hermitian(h);

    Trajectory traj;
    Matrix current = initial;
    const Complex i(0.0, 1.0);
    for (int k = 0; k < grid.count; ++k) {
        const double t = p.physical_time(grid.time(k));
        if (method == ClosedMethod::laguerre) {
            if (k > 0) current = step * current;
        } else {
            Vector phases(eig.values.size());
            for (Eigen::Index q = 0; q < phases.size(); ++q) phases(q) = std::exp(-i * eig.values(q) * t);
            current = eig.vectors * (phases.asDiagonal() * (eig.vectors.adjoint() * initial));
        }
        Matrix rho = Matrix::Zero(4, 4);
        for (std::size_t s = 0; s < terms.size(); ++s) {
            const Eigen::Map<const Matrix> psi(current.col(static_cast<Eigen::Index>(s)).data(), bath_dim, 4);
            rho += terms[s].weight * (psi.transpose() * psi.conjugate());
        }
        record(traj, grid.time(k), std::move(rho));
    }
    return traj;
}

} // namespace

Trajectory evolve_closed(BellKind kind, BathKind bath, const ModelParams& p, const TimeGrid& grid, ClosedMethod method,
                         const ClosedOptions& opts) {
    p.validate();
    grid.validate();
    require_closed(p);
    const auto terms = bath_terms(bath, p, opts.cutoff_weight);
    return opts.factorized ? closed_factorized(kind, terms, p, grid, method, opts.laguerre)
                           : closed_full_space(kind, terms, p, grid, method, opts.laguerre);
}

Matrix rk4_step(const LindbladGenerator& gen, const Matrix& rho, double h) {
    const Matrix k1 = gen.apply(rho);
    const Matrix k2 = gen.apply(rho + 0.5 * h * k1);
    const Matrix k3 = gen.apply(rho + 0.5 * h * k2);
    const Matrix k4 = gen.apply(rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix rk4_propagate(const LindbladGenerator& gen, Matrix rho, double t, double max_step) {
    if (!(max_step > 0.0)) throw InvalidInput("rk4_propagate: step must be positive");
    const int steps = std::max(1, static_cast<int>(std::ceil(t / max_step - 1e-12)));
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) rho = rk4_step(gen, rho, h);
    return rho;
}

namespace {

// rk4_step for Hermitian rho on row-major storage, reusing its buffers.
class HermitianRk4 {
public:
    explicit HermitianRk4(const LindbladGenerator& gen) : gen_(gen) {}

    void step(RowMatrix& rho, double h) {
        gen_.apply_hermitian(rho, k_, s1_, s2_);
        acc_ = k_;
        stage_ = rho + (0.5 * h) * k_;
        gen_.apply_hermitian(stage_, k_, s1_, s2_);
        acc_ += 2.0 * k_;
        stage_ = rho + (0.5 * h) * k_;
        gen_.apply_hermitian(stage_, k_, s1_, s2_);
        acc_ += 2.0 * k_;
        stage_ = rho + h * k_;
        gen_.apply_hermitian(stage_, k_, s1_, s2_);
        acc_ += k_;
        rho += (h / 6.0) * acc_;
    }

private:
    const LindbladGenerator& gen_;
    RowMatrix k_, acc_, stage_, s1_, s2_;
};

Trajectory lindblad_joint(BellKind kind, const ModelParams& p, const TimeGrid& grid, const LindbladOptions& opts) {
    const SpaceLayout layout = SpaceLayout::atoms_and_modes(p.n_max);
    const LindbladGenerator gen = joint_generator(p, layout);
    const RowMatrix rho0 = initial_density(kind, BathKind::vacuum, p, layout).entries;
    HermitianRk4 stepper(gen);
    const std::vector<int> atoms{factor::atom1, factor::atom2};
    const double dt = p.physical_time(grid.dt);

    int substeps = opts.substeps;
    double drift = 0.0;
    for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, substeps *= 2) {
        Trajectory traj;
        RowMatrix rho = rho0;
        drift = 0.0;
        bool stable = true;
        for (int k = 0; k < grid.count && stable; ++k) {
            if (k > 0)
                for (int s = 0; s < substeps; ++s) stepper.step(rho, dt / substeps);
            const double full_drift = std::abs(rho.trace() - 1.0);
            if (!std::isfinite(full_drift) || full_drift > opts.trace_drift_limit) {
                drift = full_drift;
                stable = false;
                break;
            }
            record(traj, grid.time(k), partial_trace(Matrix(rho), atoms, layout));
            traj.max_trace_drift = std::max(traj.max_trace_drift, full_drift);
        }
        if (stable) return traj;
    }
    throw NumericalFailure("evolve_lindblad: trace drift " + std::to_string(drift) +
                               " exceeds the limit; use a smaller internal step",
                           drift);
}

// Per pair, the operator blocks |a,0><c,0| (a, c in {0, 1}) evolved by the local
// generator; `advance` moves all four blocks on by one grid interval.
struct PairBlocks {
    int n;
    std::array<Matrix, 4> ops;  // index 2a + c

    explicit PairBlocks(int n_max) : n(n_max) {
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) {
                Matrix op = Matrix::Zero(2 * n, 2 * n);
                op(a * n, c * n) = 1.0;
                ops[static_cast<std::size_t>(2 * a + c)] = std::move(op);
            }
    }
    Eigen::Matrix2cd reduced(int a, int c) const { return trace_mode(ops[static_cast<std::size_t>(2 * a + c)], n); }
};

template <class Advance>
Trajectory lindblad_pairs(BellKind kind, const ModelParams& p, const TimeGrid& grid, const LindbladOptions& opts,
                          Advance&& advance) {
    std::array<PairBlocks, 2> pairs{PairBlocks(p.n_max), PairBlocks(p.n_max)};
    const Eigen::Matrix2cd coeffs = bell_coefficients(kind);
    Trajectory traj;
    for (int k = 0; k < grid.count; ++k) {
        if (k > 0)
            for (int j = 0; j < 2; ++j) advance(j, pairs[static_cast<std::size_t>(j)]);
        Matrix rho = combine_channels(
            coeffs, [&](int a, int c) { return pairs[0].reduced(a, c); },
            [&](int b, int d) { return pairs[1].reduced(b, d); });
        record(traj, grid.time(k), std::move(rho));
        if (!std::isfinite(traj.max_trace_drift) || traj.max_trace_drift > opts.trace_drift_limit)
            throw NumericalFailure("evolve_lindblad: trace drift exceeds the limit", traj.max_trace_drift);
    }
    return traj;
}

Trajectory lindblad_reference(BellKind kind, const ModelParams& p, const TimeGrid& grid, const LindbladOptions& opts) {
    const int d = 2 * p.n_max;
    const double dt = p.physical_time(grid.dt);
    std::array<Matrix, 2> steps;
    for (int j = 1; j <= 2; ++j) steps[static_cast<std::size_t>(j - 1)] = (local_generator(j, p).superoperator() * dt).exp();
    return lindblad_pairs(kind, p, grid, opts, [&](int j, PairBlocks& pair) {
        for (auto& op : pair.ops) {
            // column-major vec(op) matches the superoperator convention
            const Vector next = steps[static_cast<std::size_t>(j)] * Eigen::Map<const Vector>(op.data(), d * d);
            op = Eigen::Map<const Matrix>(next.data(), d, d);
        }
    });
}

Trajectory lindblad_factorized_rk4(BellKind kind, const ModelParams& p, const TimeGrid& grid,
                                   const LindbladOptions& opts) {
    const std::array<LindbladGenerator, 2> gens{local_generator(1, p), local_generator(2, p)};
    const double dt = p.physical_time(grid.dt);
    int substeps = opts.substeps;
    double drift = 0.0;
    for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, substeps *= 2) {
        try {
            return lindblad_pairs(kind, p, grid, opts, [&](int j, PairBlocks& pair) {
                for (auto& op : pair.ops)
                    for (int s = 0; s < substeps; ++s) op = rk4_step(gens[static_cast<std::size_t>(j)], op, dt / substeps);
            });
        } catch (const NumericalFailure& e) {
            drift = e.residual();
        }
    }
    throw NumericalFailure("evolve_lindblad: trace drift " + std::to_string(drift) +
                               " exceeds the limit; use a smaller internal step",
                           drift);
}

} // namespace

Trajectory evolve_lindblad(BellKind kind, const ModelParams& p, const TimeGrid& grid, LindbladStepper stepper,
                           const LindbladOptions& opts) {
    p.validate();
    grid.validate();
    if (opts.substeps < 1 || opts.max_halvings < 0) throw InvalidInput("LindbladOptions: invalid step settings");
    if (stepper == LindbladStepper::reference) return lindblad_reference(kind, p, grid, opts);
    return opts.factorized ? lindblad_factorized_rk4(kind, p, grid, opts) : lindblad_joint(kind, p, grid, opts);
}

} // namespace bellcav
