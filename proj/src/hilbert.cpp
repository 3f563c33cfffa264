#include "bellcav/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bellcav {

SpaceLayout::SpaceLayout(std::vector<int> factor_dims) : dims_(std::move(factor_dims)) {
    if (dims_.empty()) throw InvalidInput("SpaceLayout: no factors");
    for (int d : dims_) {
        if (d < 2) throw InvalidInput("SpaceLayout: every factor dimension must be >= 2");
        total_ *= d;
    }
    if (dims_.size() == 4 && dims_[factor::mode1] != dims_[factor::mode2])
        throw InvalidInput("SpaceLayout: both cavity modes must share one Fock cutoff");
}

SpaceLayout SpaceLayout::atoms_and_modes(int n_max) { return SpaceLayout({2, 2, n_max, n_max}); }

SpaceLayout SpaceLayout::atom_and_mode(int n_max) { return SpaceLayout({2, n_max}); }

std::vector<int> SpaceLayout::digits(int index) const {
    if (index < 0 || index >= total_) throw InvalidInput("SpaceLayout::digits: index out of range");
    std::vector<int> out(dims_.size());
    for (std::size_t f = dims_.size(); f-- > 0;) {
        out[f] = index % dims_[f];
        index /= dims_[f];
    }
    return out;
}

int SpaceLayout::index(std::span<const int> digits) const {
    if (digits.size() != dims_.size()) throw InvalidInput("SpaceLayout::index: wrong digit count");
    int idx = 0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
        if (digits[f] < 0 || digits[f] >= dims_[f])
            throw InvalidInput("SpaceLayout::index: digit out of range");
        idx = idx * dims_[f] + digits[f];
    }
    return idx;
}

double hermiticity_error(const Matrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix identity(int dim) { return {Matrix::Identity(dim, dim), true}; }

OperatorMatrix pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return {m, true};
}

OperatorMatrix pauli_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return {m, true};
}

OperatorMatrix pauli_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return {m, true};
}

// a|n> = sqrt(n)|n-1>
OperatorMatrix annihilation(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {m, false};
}

OperatorMatrix number_operator(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
    return {m, true};
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.entries.rows() != a.entries.cols() || b.entries.rows() != b.entries.cols())
        throw InvalidInput("kron: operands must be square");
    Matrix out = Eigen::kroneckerProduct(a.entries, b.entries).eval();
    return {std::move(out), a.hermitian && b.hermitian};
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

OperatorMatrix embed(const OperatorMatrix& op, int factor_index, const SpaceLayout& layout) {
    if (factor_index < 0 || factor_index >= layout.factor_count())
        throw InvalidInput("embed: factor index out of range");
    if (op.entries.rows() != layout.factor_dim(factor_index) || op.entries.cols() != op.entries.rows())
        throw InvalidInput("embed: operator dimension does not match its factor");

    int left = 1;
    for (int f = 0; f < factor_index; ++f) left *= layout.factor_dim(f);
    int right = layout.total_dim() / (left * layout.factor_dim(factor_index));

    OperatorMatrix out = kron(kron(identity(left), op), identity(right));
    out.hermitian = op.hermitian;
    return out;
}

Matrix partial_trace(const Matrix& rho, std::span<const int> keep, const SpaceLayout& layout) {
    if (rho.rows() != layout.total_dim() || rho.cols() != layout.total_dim())
        throw InvalidInput("partial_trace: matrix does not match layout");
    if (keep.empty()) throw InvalidInput("partial_trace: keep set is empty");

    std::vector<bool> kept(static_cast<std::size_t>(layout.factor_count()), false);
    for (int f : keep) {
        if (f < 0 || f >= layout.factor_count()) throw InvalidInput("partial_trace: factor index out of range");
        if (kept[static_cast<std::size_t>(f)]) throw InvalidInput("partial_trace: duplicate factor index");
        kept[static_cast<std::size_t>(f)] = true;
    }

    int kept_dim = 1;
    int traced_dim = 1;
    for (int f = 0; f < layout.factor_count(); ++f) (kept[f] ? kept_dim : traced_dim) *= layout.factor_dim(f);

    // Flat index of every (kept, traced) pair, kept digits row-major in layout order.
    std::vector<int> full_index(static_cast<std::size_t>(kept_dim) * traced_dim);
    for (int i = 0; i < layout.total_dim(); ++i) {
        const auto d = layout.digits(i);
        int k = 0;
        int t = 0;
        for (int f = 0; f < layout.factor_count(); ++f) {
            if (kept[f])
                k = k * layout.factor_dim(f) + d[f];
            else
                t = t * layout.factor_dim(f) + d[f];
        }
        full_index[static_cast<std::size_t>(k) * traced_dim + t] = i;
    }

    Matrix out = Matrix::Zero(kept_dim, kept_dim);
    for (int a = 0; a < kept_dim; ++a)
        for (int b = 0; b < kept_dim; ++b) {
            Complex sum = 0.0;
            for (int t = 0; t < traced_dim; ++t)
                sum += rho(full_index[static_cast<std::size_t>(a) * traced_dim + t],
                           full_index[static_cast<std::size_t>(b) * traced_dim + t]);
            out(a, b) = sum;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep, const SpaceLayout& layout) {
    return {partial_trace(rho.entries, keep, layout)};
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

EigenDecomposition eig_hermitian(const OperatorMatrix& a) {
    if (!a.hermitian) throw InvalidInput("eig_hermitian: operator is not flagged Hermitian");
    if (hermiticity_error(a.entries) > 1e-10) throw InvalidInput("eig_hermitian: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eig_hermitian: eigensolver failed", 0.0);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("hermitian_eigenvalues: eigensolver failed", 0.0);
    return solver.eigenvalues();
}

DensityDiagnostics diagnose(const Matrix& rho) {
    const Matrix sym = 0.5 * (rho + rho.adjoint());
    return {hermiticity_error(rho), std::abs(rho.trace() - 1.0), hermitian_eigenvalues(sym).minCoeff()};
}

} // namespace bellcav
