// model.hpp — atom–cavity Hamiltonians and the photon-loss master equation

#pragma once

#include "bellcav/hilbert.hpp"

#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace bellcav {

/// Parameters of both atom–cavity subsystems. Index 0 holds subsystem 1.
///
/// Energies and rates share the unit of omega (hbar = k_B = 1). Defaults:
/// omega = 0.4, epsilon = -0.5, g = 0.2, no leakage, zero temperature.
struct ModelParams {
    std::array<double, 2> omega{0.4, 0.4};
    std::array<double, 2> epsilon{-0.5, -0.5};
    std::array<double, 2> g{0.2, 0.2};
    std::array<double, 2> gamma{0.0, 0.0};
    double temperature = 0.0;
    int n_max = 8;
    /// Swap which qubit level the +omega/2 sigma_z term raises.
    bool flip_qubit_basis = false;

    void validate() const;

    /// (1 + epsilon_j) omega_j for j = 1 | 2.
    double mode_frequency(int j) const;

    /// Physical time of a point on the omega_1 t axis.
    double physical_time(double omega_t) const { return omega_t / omega[0]; }
};

/// H_j = omega_j/2 sz_j + (1+eps_j) omega_j a_j^dag a_j + g_j omega_j (a_j^dag + a_j) sx_j
/// on the four-factor layout (acts on factors j-1 and j+1).
OperatorMatrix build_subsystem_hamiltonian(int j, const ModelParams& p, const SpaceLayout& layout);

/// The same H_j on the [2, n_max] space of atom j and mode j alone.
OperatorMatrix build_local_hamiltonian(int j, const ModelParams& p);

/// H = H_1 + H_2.
OperatorMatrix build_total_hamiltonian(const ModelParams& p, const SpaceLayout& layout);

/// H_B = sum_j (1+eps_j) omega_j a_j^dag a_j.
OperatorMatrix build_bath_hamiltonian(const ModelParams& p, const SpaceLayout& layout);

/// H_S = omega_1/2 sz_1 + omega_2/2 sz_2 on the qubit pair, basis |00>,|01>,|10>,|11>.
OperatorMatrix build_free_qubit_hamiltonian(const ModelParams& p);

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct JumpOperator {
    double rate;
    OperatorMatrix op;
};

/// d rho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}).
///
/// Stored as the non-Hermitian effective Hamiltonian H - i/2 sum rate L^dag L
/// plus the jump terms, all sparse. apply() accepts any square matrix, not only
/// Hermitian ones, so it can propagate operator blocks such as |a><c|.
class LindbladGenerator {
public:
    LindbladGenerator(const OperatorMatrix& h, const std::vector<JumpOperator>& jumps);

    Matrix apply(const Matrix& rho) const;

    /// apply() specialised to Hermitian rho in row-major storage; `out` and the
    /// two scratch matrices are resized as needed and must not alias rho.
    void apply_hermitian(const RowMatrix& rho, RowMatrix& out, RowMatrix& scratch, RowMatrix& scratch2) const;

    Eigen::Index dim() const noexcept { return h_eff_.rows(); }

    /// Dense superoperator acting on column-major vec(rho). Size dim^2 x dim^2.
    Matrix superoperator() const;

private:
    struct RowTerms {
        std::vector<int> start;
        std::vector<int> col;
        std::vector<Complex> val;
    };
    static RowTerms row_terms(const SparseMatrix& m);
    static void multiply(const RowTerms& s, const RowMatrix& in, RowMatrix& out);

    SparseMatrix h_eff_;
    std::vector<std::pair<double, SparseMatrix>> jumps_;
    RowTerms h_eff_rows_;
    std::vector<std::pair<double, RowTerms>> jump_rows_;
};

/// Generator on the full [2, 2, N, N] layout with one photon-loss channel per cavity.
LindbladGenerator joint_generator(const ModelParams& p, const SpaceLayout& layout);

/// Generator of subsystem j alone on [2, N].
LindbladGenerator local_generator(int j, const ModelParams& p);

/// One evaluation of the joint master equation right-hand side.
Matrix lindblad_rhs(const Matrix& rho, const OperatorMatrix& h, const ModelParams& p,
                    const SpaceLayout& layout);

} // namespace bellcav
