// hilbert.hpp — dense tensor-product linear algebra over [atom1, atom2, mode1, mode2]

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellcav {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised for inputs that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot meet its accuracy contract.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Factor indices of the standard two-atom / two-cavity layout.
namespace factor {
inline constexpr int atom1 = 0;
inline constexpr int atom2 = 1;
inline constexpr int mode1 = 2;
inline constexpr int mode2 = 3;
} // namespace factor

/// Ordered factor dimensions of a composite Hilbert space.
///
/// Basis indices are row-major over the factor order: the last factor varies
/// fastest. Four-factor layouts are [atom1, atom2, mode1, mode2] and must carry
/// equal mode dimensions.
class SpaceLayout {
public:
    explicit SpaceLayout(std::vector<int> factor_dims);

    /// [2, 2, n_max, n_max]
    static SpaceLayout atoms_and_modes(int n_max);
    /// [2, n_max]: one atom with its own cavity mode.
    static SpaceLayout atom_and_mode(int n_max);

    const std::vector<int>& factor_dims() const noexcept { return dims_; }
    int factor_count() const noexcept { return static_cast<int>(dims_.size()); }
    int factor_dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
    int total_dim() const noexcept { return total_; }

    /// Per-factor digits of a flat basis index.
    std::vector<int> digits(int index) const;
    /// Flat basis index of per-factor digits.
    int index(std::span<const int> digits) const;

    bool operator==(const SpaceLayout&) const = default;

private:
    std::vector<int> dims_;
    int total_ = 1;
};

struct OperatorMatrix {
    Matrix entries;
    bool hermitian = false;

    Eigen::Index dim() const noexcept { return entries.rows(); }
};

struct StateVector {
    Vector amplitudes;
};

struct DensityMatrix {
    Matrix entries;
};

/// max |A - A^dagger| over entries.
double hermiticity_error(const Matrix& a);

OperatorMatrix identity(int dim);
OperatorMatrix pauli_x();
OperatorMatrix pauli_y();
OperatorMatrix pauli_z();
/// Truncated bosonic annihilation operator on occupations 0..dim-1.
OperatorMatrix annihilation(int dim);
OperatorMatrix number_operator(int dim);

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);
Vector kron(const Vector& a, const Vector& b);

/// I ⊗ … ⊗ op ⊗ … ⊗ I with op at factor_index.
OperatorMatrix embed(const OperatorMatrix& op, int factor_index, const SpaceLayout& layout);

/// Reduced density matrix on the kept factors, in their layout order.
Matrix partial_trace(const Matrix& rho, std::span<const int> keep, const SpaceLayout& layout);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep,
                            const SpaceLayout& layout);

/// |v><v|
Matrix projector(const Vector& v);

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // columns are eigenvectors
};

/// Eigen-decomposition of a Hermitian operator; rejects operators without the
/// hermitian flag or whose entries are not Hermitian to 1e-10.
EigenDecomposition eig_hermitian(const OperatorMatrix& a);

/// Sorted eigenvalues of a Hermitian matrix given without the operator wrapper.
RealVector hermitian_eigenvalues(const Matrix& a);

struct DensityDiagnostics {
    double hermiticity_error;
    double trace_error;
    double min_eigenvalue;
};

DensityDiagnostics diagnose(const Matrix& rho);

} // namespace bellcav
