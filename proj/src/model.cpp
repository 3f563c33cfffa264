#include "bellcav/model.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

namespace bellcav {

void ModelParams::validate() const {
    for (int k = 0; k < 2; ++k) {
        if (!(omega[k] > 0.0)) throw InvalidInput("ModelParams: omega must be positive");
        if (!(g[k] >= 0.0)) throw InvalidInput("ModelParams: g must be non-negative");
        if (!(gamma[k] >= 0.0)) throw InvalidInput("ModelParams: gamma must be non-negative");
        if (!((1.0 + epsilon[k]) * omega[k] > 0.0))
            throw InvalidInput("ModelParams: cavity frequency (1+epsilon)*omega must be positive");
    }
    if (!(temperature >= 0.0)) throw InvalidInput("ModelParams: temperature must be non-negative");
    if (n_max < 2) throw InvalidInput("ModelParams: n_max must be at least 2");
}

double ModelParams::mode_frequency(int j) const {
    if (j != 1 && j != 2) throw InvalidInput("ModelParams: subsystem index must be 1 or 2");
    return (1.0 + epsilon[j - 1]) * omega[j - 1];
}

namespace {

void check_subsystem(int j) {
    if (j != 1 && j != 2) throw InvalidInput("subsystem index must be 1 or 2");
}

void check_layout(const ModelParams& p, const SpaceLayout& layout) {
    if (layout.factor_count() != 4 || layout.factor_dim(factor::atom1) != 2 ||
        layout.factor_dim(factor::atom2) != 2 || layout.factor_dim(factor::mode1) != p.n_max)
        throw InvalidInput("layout does not match [2, 2, n_max, n_max]");
}

OperatorMatrix qubit_z(const ModelParams& p) {
    OperatorMatrix z = pauli_z();
    if (p.flip_qubit_basis) z.entries = -z.entries;
    return z;
}

OperatorMatrix subsystem_hamiltonian(int j, const ModelParams& p, const SpaceLayout& layout, int atom_factor,
                                     int mode_factor) {
    const int k = j - 1;
    const int n = layout.factor_dim(mode_factor);
    const OperatorMatrix a = annihilation(n);
    const OperatorMatrix quadrature{a.entries + a.entries.adjoint(), true};

    const Matrix sz = embed(qubit_z(p), atom_factor, layout).entries;
    const Matrix sx = embed(pauli_x(), atom_factor, layout).entries;
    const Matrix num = embed(number_operator(n), mode_factor, layout).entries;
    const Matrix x = embed(quadrature, mode_factor, layout).entries;

    Matrix h = 0.5 * p.omega[k] * sz + p.mode_frequency(j) * num + p.g[k] * p.omega[k] * (x * sx);
    return {std::move(h), true};
}

SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(); }

} // namespace

OperatorMatrix build_subsystem_hamiltonian(int j, const ModelParams& p, const SpaceLayout& layout) {
    check_subsystem(j);
    p.validate();
    check_layout(p, layout);
    return subsystem_hamiltonian(j, p, layout, j == 1 ? factor::atom1 : factor::atom2,
                                 j == 1 ? factor::mode1 : factor::mode2);
}

OperatorMatrix build_local_hamiltonian(int j, const ModelParams& p) {
    check_subsystem(j);
    p.validate();
    return subsystem_hamiltonian(j, p, SpaceLayout::atom_and_mode(p.n_max), 0, 1);
}

OperatorMatrix build_total_hamiltonian(const ModelParams& p, const SpaceLayout& layout) {
    OperatorMatrix h1 = build_subsystem_hamiltonian(1, p, layout);
    const OperatorMatrix h2 = build_subsystem_hamiltonian(2, p, layout);
    h1.entries += h2.entries;
    return h1;
}

OperatorMatrix build_bath_hamiltonian(const ModelParams& p, const SpaceLayout& layout) {
    p.validate();
    check_layout(p, layout);
    const OperatorMatrix num = number_operator(p.n_max);
    Matrix h = p.mode_frequency(1) * embed(num, factor::mode1, layout).entries +
               p.mode_frequency(2) * embed(num, factor::mode2, layout).entries;
    return {std::move(h), true};
}

OperatorMatrix build_free_qubit_hamiltonian(const ModelParams& p) {
    p.validate();
    const SpaceLayout qubits({2, 2});
    const OperatorMatrix z = qubit_z(p);
    Matrix h = 0.5 * p.omega[0] * embed(z, 0, qubits).entries + 0.5 * p.omega[1] * embed(z, 1, qubits).entries;
    return {std::move(h), true};
}

LindbladGenerator::LindbladGenerator(const OperatorMatrix& h, const std::vector<JumpOperator>& jumps) {
    if (h.entries.rows() != h.entries.cols()) throw InvalidInput("LindbladGenerator: Hamiltonian must be square");
    Matrix h_eff = h.entries;
    for (const auto& jump : jumps) {
        if (jump.op.entries.rows() != h.entries.rows() || jump.op.entries.cols() != h.entries.cols())
            throw InvalidInput("LindbladGenerator: jump operator dimension mismatch");
        if (!(jump.rate >= 0.0)) throw InvalidInput("LindbladGenerator: negative rate");
        if (jump.rate == 0.0) continue;
        h_eff -= Complex(0.0, 0.5 * jump.rate) * (jump.op.entries.adjoint() * jump.op.entries);
        jumps_.emplace_back(jump.rate, to_sparse(jump.op.entries));
    }
    h_eff_ = to_sparse(h_eff);
    h_eff_rows_ = row_terms(h_eff_);
    for (const auto& [rate, l] : jumps_) jump_rows_.emplace_back(rate, row_terms(l));
}

LindbladGenerator::RowTerms LindbladGenerator::row_terms(const SparseMatrix& m) {
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor> rows(m);
    RowTerms t;
    t.start.push_back(0);
    for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
        for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
            t.col.push_back(static_cast<int>(it.col()));
            t.val.push_back(it.value());
        }
        t.start.push_back(static_cast<int>(t.col.size()));
    }
    return t;
}

// out = S in, one axpy over a full row of `in` per nonzero of S.
void LindbladGenerator::multiply(const RowTerms& s, const RowMatrix& in, RowMatrix& out) {
    out.resize(in.rows(), in.cols());
    const Eigen::Index rows = static_cast<Eigen::Index>(s.start.size()) - 1;
    for (Eigen::Index r = 0; r < rows; ++r) {
        auto dst = out.row(r);
        dst.setZero();
        for (int k = s.start[static_cast<std::size_t>(r)]; k < s.start[static_cast<std::size_t>(r) + 1]; ++k)
            dst += s.val[static_cast<std::size_t>(k)] * in.row(s.col[static_cast<std::size_t>(k)]);
    }
}

void LindbladGenerator::apply_hermitian(const RowMatrix& rho, RowMatrix& out, RowMatrix& scratch,
                                        RowMatrix& scratch2) const {
    const Complex i(0.0, 1.0);
    // -i H_eff rho + i rho H_eff^dag = -i X + i X^dag with X = H_eff rho
    multiply(h_eff_rows_, rho, scratch);
    out = scratch.adjoint();
    out *= i;
    out.noalias() -= i * scratch;
    // L rho L^dag = L (L rho)^dag
    for (const auto& [rate, l] : jump_rows_) {
        multiply(l, rho, scratch);
        scratch2 = scratch.adjoint();
        multiply(l, scratch2, scratch);
        out.noalias() += rate * scratch;
    }
}

Matrix LindbladGenerator::apply(const Matrix& rho) const {
    const Complex i(0.0, 1.0);
    // rho H_eff^dag = (H_eff rho^dag)^dag
    const Matrix left = h_eff_ * rho;
    const Matrix right = h_eff_ * rho.adjoint();
    Matrix out = -i * left + i * right.adjoint();
    for (const auto& [rate, l] : jumps_) {
        const Matrix lr = l * rho;
        const Matrix lrl = l * lr.adjoint();
        out.noalias() += rate * lrl.adjoint();
    }
    return out;
}

Matrix LindbladGenerator::superoperator() const {
    const Eigen::Index d = dim();
    const Complex i(0.0, 1.0);
    const Matrix h = Matrix(h_eff_);
    const Matrix id = Matrix::Identity(d, d);
    // vec(A X B) = (B^T ⊗ A) vec(X) for column-major vec
    Matrix out = (-i * Eigen::kroneckerProduct(id, h)).eval();
    out += (i * Eigen::kroneckerProduct(h.conjugate(), id)).eval();
    for (const auto& [rate, l_sparse] : jumps_) {
        const Matrix l = Matrix(l_sparse);
        out += (rate * Eigen::kroneckerProduct(l.conjugate(), l)).eval();
    }
    return out;
}

LindbladGenerator joint_generator(const ModelParams& p, const SpaceLayout& layout) {
    const OperatorMatrix h = build_total_hamiltonian(p, layout);
    const OperatorMatrix a = annihilation(p.n_max);
    return LindbladGenerator(h, {{p.gamma[0], embed(a, factor::mode1, layout)},
                                 {p.gamma[1], embed(a, factor::mode2, layout)}});
}

LindbladGenerator local_generator(int j, const ModelParams& p) {
    const OperatorMatrix h = build_local_hamiltonian(j, p);
    const OperatorMatrix a = embed(annihilation(p.n_max), 1, SpaceLayout::atom_and_mode(p.n_max));
    return LindbladGenerator(h, {{p.gamma[static_cast<std::size_t>(j - 1)], a}});
}

Matrix lindblad_rhs(const Matrix& rho, const OperatorMatrix& h, const ModelParams& p, const SpaceLayout& layout) {
    p.validate();
    check_layout(p, layout);
    if (rho.rows() != layout.total_dim() || h.entries.rows() != layout.total_dim())
        throw InvalidInput("lindblad_rhs: operands do not match layout");
    const OperatorMatrix a = annihilation(p.n_max);
    const LindbladGenerator gen(h, {{p.gamma[0], embed(a, factor::mode1, layout)},
                                    {p.gamma[1], embed(a, factor::mode2, layout)}});
    return gen.apply(rho);
}

} // namespace bellcav
