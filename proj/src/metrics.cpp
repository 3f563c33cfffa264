#include "bellcav/metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace bellcav {

namespace {

constexpr double kClipTolerance = 1e-9;

// Values within the tolerance of a bound are pulled onto it; anything further
// out is left alone so range checks downstream still see it.
double clip(double x, double lo, double hi) {
    if (x < lo && x >= lo - kClipTolerance) return lo;
    if (x > hi && x <= hi + kClipTolerance) return hi;
    return x;
}

void require_two_qubit(const Matrix& rho, const char* what) {
    if (rho.rows() != 4 || rho.cols() != 4) throw InvalidInput(std::string(what) + ": expected a 4x4 matrix");
}

Matrix spin_flip() {
    const Matrix y = pauli_y().entries;
    return kron(OperatorMatrix{y, true}, OperatorMatrix{y, true}).entries;
}

double wootters(std::array<double, 4> lambdas) {
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return clip(std::max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]), 0.0, 1.0);
}

} // namespace

double concurrence(const Matrix& rho) {
    require_two_qubit(rho, "concurrence");
    // With rho = X X^dag, tau = X^T Y X has tau^dag tau similar to
    // sqrt(rho) Y rho* Y sqrt(rho), so its singular values are the lambdas
    // directly, without squaring and re-rooting near-zero eigenvalues.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()));
    const RealVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix x = eig.eigenvectors() * root.asDiagonal();
    const Matrix tau = x.transpose() * spin_flip() * x;
    const RealVector sv = Eigen::JacobiSVD<Matrix>(tau).singularValues();
    std::array<double, 4> lambdas{};
    for (int k = 0; k < 4; ++k) lambdas[static_cast<std::size_t>(k)] = sv(k);
    return wootters(lambdas);
}

double concurrence_direct(const Matrix& rho) {
    require_two_qubit(rho, "concurrence_direct");
    const Matrix y = spin_flip();
    const Matrix r = rho * y * rho.conjugate() * y;
    Eigen::ComplexEigenSolver<Matrix> eig(r, false);
    std::array<double, 4> lambdas{};
    for (int k = 0; k < 4; ++k) lambdas[static_cast<std::size_t>(k)] = std::sqrt(std::max(eig.eigenvalues()(k).real(), 0.0));
    return wootters(lambdas);
}

Matrix ideal_evolution(BellKind kind, const ModelParams& p, double t) {
    const Matrix hs = build_free_qubit_hamiltonian(p).entries;
    Vector psi = bell_state(kind).amplitudes;
    for (int k = 0; k < 4; ++k) psi(k) *= std::exp(Complex(0.0, -hs(k, k).real() * t));
    return projector(psi);
}

double fidelity(const Matrix& rho_s, const Matrix& rho_ideal) {
    if (rho_s.rows() != rho_ideal.rows() || rho_s.cols() != rho_ideal.cols())
        throw InvalidInput("fidelity: dimension mismatch");
    return clip((rho_ideal * rho_s).trace().real(), 0.0, 1.0);
}

double entropy_exchange(const Matrix& rho_s) {
    const RealVector ev = hermitian_eigenvalues(0.5 * (rho_s + rho_s.adjoint()));
    if (ev.minCoeff() < -1e-6) throw InvalidInput("entropy_exchange: state is not positive semidefinite");
    double s = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (ev(k) > 0.0) s -= ev(k) * std::log2(ev(k));
    return clip(s, 0.0, std::log2(static_cast<double>(rho_s.rows())));
}

Matrix partial_transpose(const Matrix& rho) {
    require_two_qubit(rho, "partial_transpose");
    Matrix out(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int k2 = 0; k2 < 2; ++k2) out(2 * i + k, 2 * i2 + k2) = rho(2 * i + k2, 2 * i2 + k);
    return out;
}

MetricSeries evaluate_metrics(const Trajectory& traj, BellKind kind, const ModelParams& p) {
    MetricSeries series;
    series.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const Matrix& rho = traj.reduced_states[k];
        const Matrix ideal = ideal_evolution(kind, p, p.physical_time(traj.times[k]));
        series.push_back({traj.times[k], concurrence(rho), fidelity(rho, ideal), entropy_exchange(rho)});
    }
    return series;
}

} // namespace bellcav
