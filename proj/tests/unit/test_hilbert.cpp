#include "bellcav/hilbert.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bellcav;
using bellcav::testing::max_abs;

TEST_CASE("layout validation and indexing") {
    CHECK_THROWS_AS(SpaceLayout({2, 1}), InvalidInput);
    CHECK_THROWS_AS(SpaceLayout({2, 2, 3, 4}), InvalidInput);
    const SpaceLayout l = SpaceLayout::atoms_and_modes(3);
    CHECK(l.total_dim() == 36);
    // last factor varies fastest
    CHECK(l.index(std::vector<int>{0, 0, 0, 1}) == 1);
    CHECK(l.index(std::vector<int>{0, 0, 1, 0}) == 3);
    CHECK(l.index(std::vector<int>{1, 0, 0, 0}) == 18);
    CHECK(l.digits(l.index(std::vector<int>{1, 1, 2, 0})) == std::vector<int>{1, 1, 2, 0});
}

TEST_CASE("single-factor operators") {
    CHECK(pauli_z().entries(0, 0) == Complex(1.0));
    CHECK(pauli_z().entries(1, 1) == Complex(-1.0));
    const Matrix a = annihilation(5).entries;
    const Matrix n = number_operator(5).entries;
    CHECK(max_abs(a.adjoint() * a - n) < 1e-14);
    CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
    // [a, a^dag] = 1 except in the truncated corner
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    for (int k = 0; k < 4; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
    const Matrix xy = pauli_x().entries * pauli_y().entries;
    CHECK(max_abs(xy - Complex(0.0, 1.0) * pauli_z().entries) < 1e-15);
}

TEST_CASE("kron and embed agree") {
    std::mt19937_64 rng(1);
    const SpaceLayout l({2, 3, 2});
    const OperatorMatrix op = bellcav::testing::random_hermitian(rng, 3);
    const OperatorMatrix direct = kron(kron(identity(2), op), identity(2));
    CHECK(max_abs(direct.entries - embed(op, 1, l).entries) < 1e-14);
    CHECK_THROWS_AS(embed(op, 0, l), InvalidInput);
}

TEST_CASE("partial trace of products and Schmidt states") {
    std::mt19937_64 rng(2);
    const SpaceLayout l({2, 3});
    const Matrix a = bellcav::testing::random_density(rng, 2, 2);
    const Matrix b = bellcav::testing::random_density(rng, 3, 3);
    const Matrix ab = kron(OperatorMatrix{a, true}, OperatorMatrix{b, true}).entries;
    const std::vector<int> first{0}, second{1};
    CHECK(max_abs(partial_trace(ab, first, l) - a) < 1e-14);
    CHECK(max_abs(partial_trace(ab, second, l) - b) < 1e-14);

    // |psi> = sqrt(0.3)|0,0> + sqrt(0.7)|1,2>: both marginals diag(0.3, 0.7)
    Vector psi = Vector::Zero(6);
    psi(l.index(std::vector<int>{0, 0})) = std::sqrt(0.3);
    psi(l.index(std::vector<int>{1, 2})) = std::sqrt(0.7);
    const Matrix rho_a = partial_trace(projector(psi), first, l);
    CHECK(std::abs(rho_a(0, 0) - 0.3) < 1e-15);
    CHECK(std::abs(rho_a(1, 1) - 0.7) < 1e-15);
    CHECK(std::abs(rho_a(0, 1)) < 1e-15);
    const RealVector eb = hermitian_eigenvalues(partial_trace(projector(psi), second, l));
    CHECK(std::abs(eb(1) - 0.3) < 1e-14);
    CHECK(std::abs(eb(2) - 0.7) < 1e-14);
}

TEST_CASE("partial trace preserves trace and Hermiticity in any keep order") {
    std::mt19937_64 rng(3);
    const SpaceLayout l({2, 2, 3, 3});
    const Matrix rho = bellcav::testing::random_density(rng, 36, 5);
    for (const std::vector<int>& keep : {std::vector<int>{0, 1}, {2}, {0, 3}, {1, 2, 3}}) {
        const Matrix r = partial_trace(rho, keep, l);
        CHECK(std::abs(r.trace() - 1.0) < 1e-13);
        CHECK(hermiticity_error(r) < 1e-14);
    }
    const std::vector<int> bad{0, 0};
    CHECK_THROWS_AS(partial_trace(rho, bad, l), InvalidInput);
}

TEST_CASE("Hermitian eigensolver guards its input") {
    Matrix m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(eig_hermitian(OperatorMatrix{m, true}), InvalidInput);
    CHECK_THROWS_AS(eig_hermitian(OperatorMatrix{pauli_z().entries, false}), InvalidInput);
    const EigenDecomposition e = eig_hermitian(pauli_x());
    CHECK(std::abs(e.values(0) + 1.0) < 1e-15);
    CHECK(std::abs(e.values(1) - 1.0) < 1e-15);
}

TEST_CASE("density diagnostics") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.1;
    rho(1, 1) = -0.1;
    const DensityDiagnostics d = diagnose(rho);
    CHECK(std::abs(d.trace_error) < 1e-15);
    CHECK(std::abs(d.min_eigenvalue + 0.1) < 1e-15);
}

TEST_CASE("kron is associative and embeds at distinct factors commute") {
    // integer entries keep the products exact, so any layout slip shows up
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> digit(-3, 3);
    const auto integer_op = [&](int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = Complex(digit(rng), digit(rng));
        return OperatorMatrix{m, false};
    };
    const OperatorMatrix a = integer_op(2), b = integer_op(3), c = integer_op(2);
    CHECK(max_abs(kron(kron(a, b), c).entries - kron(a, kron(b, c)).entries) == 0.0);
    const SpaceLayout l = SpaceLayout::atoms_and_modes(3);
    const Matrix x = embed(a, factor::atom1, l).entries;
    const Matrix y = embed(b, factor::mode2, l).entries;
    CHECK(max_abs(x * y - y * x) == 0.0);
}

TEST_CASE("Schmidt symmetry: both reductions of a pure state share their entropy") {
    std::mt19937_64 rng(5);
    const SpaceLayout l = SpaceLayout::atoms_and_modes(3);
    const auto entropy = [](const Matrix& rho) {
        double s = 0.0;
        for (double x : hermitian_eigenvalues(rho))
            if (x > 0.0) s -= x * std::log2(x);
        return s;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const Vector psi = bellcav::testing::gaussian(rng, 36, 1).col(0).normalized();
        const Matrix rho = projector(psi);
        const std::vector<int> qubits{factor::atom1, factor::atom2}, modes{factor::mode1, factor::mode2};
        CHECK(std::abs(entropy(partial_trace(rho, qubits, l)) - entropy(partial_trace(rho, modes, l))) < 1e-8);
    }
}

TEST_CASE("eigendecomposition ordering and reconstruction") {
    const EigenDecomposition z = eig_hermitian(pauli_z());
    CHECK(z.values(0) == doctest::Approx(-1.0));
    CHECK(std::abs(z.vectors(1, 0)) == doctest::Approx(1.0));  // |1> is the lower level
    std::mt19937_64 rng(6);
    const OperatorMatrix h = bellcav::testing::random_hermitian(rng, 8);
    const EigenDecomposition e = eig_hermitian(h);
    CHECK(max_abs(h.entries - e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint()) < 1e-10);
}
