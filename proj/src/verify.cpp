#include "bellcav/figures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bellcav {

namespace {

Matrix gaussian_matrix(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal;
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
}

Matrix random_state(std::mt19937_64& rng, int rank) {
    const Matrix g = gaussian_matrix(rng, 4).leftCols(rank);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

double max_state_difference(const Trajectory& a, const Trajectory& b) {
    double diff = 0.0;
    for (std::size_t k = 0; k < a.reduced_states.size(); ++k)
        diff = std::max(diff, (a.reduced_states[k] - b.reduced_states[k]).cwiseAbs().maxCoeff());
    return diff;
}

VerifyCheck check(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value < threshold};
}

} // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<VerifyCheck> out;

    {
        double worst = 0.0;
        std::uniform_int_distribution<int> dims(2, 32);
        for (int trial = 0; trial < 10; ++trial) {
            const int d = dims(rng);
            const Matrix g = gaussian_matrix(rng, d);
            const OperatorMatrix h{0.25 * (g + g.adjoint()) / std::sqrt(static_cast<double>(d)), true};
            const Vector v = gaussian_matrix(rng, d).col(0).normalized();
            const double t = 100.0;  // omega t = 40 at omega = 0.4
            const Vector lag = laguerre_apply(h, t, StateVector{v}).amplitudes;
            worst = std::max(worst, (lag - exact_propagator(h, t).entries * v).norm());
        }
        out.push_back(check("laguerre vs exact, random Hermitian, t=100", worst, 1e-8));
    }

    const TimeGrid grid = TimeGrid::uniform(40.0, 0.032);
    {
        ModelParams p;
        p.n_max = 24;
        p.temperature = 0.25 * p.omega[0];
        const Trajectory lag = evolve_closed(BellKind::psi_plus, BathKind::thermal, p, grid, ClosedMethod::laguerre);
        const Trajectory ex = evolve_closed(BellKind::psi_plus, BathKind::thermal, p, grid, ClosedMethod::exact);
        out.push_back(check("laguerre vs exact, thermal psi+ T=0.25w", max_state_difference(lag, ex), 1e-8));
    }
    {
        ModelParams p;
        p.n_max = 4;
        p.temperature = 0.5 * p.omega[0];
        ClosedOptions full;
        full.factorized = false;
        const Trajectory fact = evolve_closed(BellKind::phi_plus, BathKind::thermal, p, grid, ClosedMethod::exact);
        const Trajectory joint = evolve_closed(BellKind::phi_plus, BathKind::thermal, p, grid, ClosedMethod::exact, full);
        out.push_back(check("factorized vs full space, closed, n_max=4", max_state_difference(fact, joint), 1e-8));
    }
    {
        ModelParams p;
        p.n_max = 4;
        p.gamma = {0.4, 0.4};
        LindbladOptions joint;
        joint.factorized = false;
        const Trajectory rk4 = evolve_lindblad(BellKind::psi_plus, p, grid, LindbladStepper::rk4, joint);
        const Trajectory pairs = evolve_lindblad(BellKind::psi_plus, p, grid, LindbladStepper::rk4);
        const Trajectory ref = evolve_lindblad(BellKind::psi_plus, p, grid, LindbladStepper::reference);
        out.push_back(check("joint rk4 vs product of channels, n_max=4", max_state_difference(rk4, ref), 1e-6));
        out.push_back(check("per-pair rk4 vs product of channels, n_max=4", max_state_difference(pairs, ref), 1e-6));
        out.push_back(check("joint rk4 trace drift", rk4.max_trace_drift, 1e-6));
    }
    {
        int mismatches = 0;
        double form_gap = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const Matrix rho = random_state(rng, 1 + trial % 4);
            const double c = concurrence(rho);
            const double min_pt = hermitian_eigenvalues(partial_transpose(rho)).minCoeff();
            if ((c > 1e-8) != (min_pt < -1e-12)) ++mismatches;
            form_gap = std::max(form_gap, std::abs(c - concurrence_direct(rho)));
        }
        out.push_back(check("concurrence vs PPT disagreements (200 states)", mismatches, 0.5));
        out.push_back(check("concurrence Hermitian vs direct form", form_gap, 1e-6));
    }
    {
        double worst = 0.0;
        const Matrix bell = projector(bell_state(BellKind::phi_plus).amplitudes);
        for (double w : {0.4, 0.5, 0.8, 0.95, 1.0}) {
            const Matrix rho = w * bell + (1.0 - w) * Matrix::Identity(4, 4) / 4.0;
            worst = std::max(worst, std::abs(concurrence(rho) - (3.0 * w - 1.0) / 2.0));
        }
        out.push_back(check("Werner concurrence (3p-1)/2", worst, 1e-10));
    }
    return out;
}

} // namespace bellcav
