#include "bellcav/states.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace bellcav;
using bellcav::testing::max_abs;

TEST_CASE("Bell states and their names") {
    const double r = 1.0 / std::sqrt(2.0);
    const Vector phi = bell_state(BellKind::phi_plus).amplitudes;
    CHECK(std::abs(phi(0) - r) < 1e-15);
    CHECK(std::abs(phi(3) - r) < 1e-15);
    const Vector psim = bell_state(BellKind::psi_minus).amplitudes;
    CHECK(std::abs(psim(1) - r) < 1e-15);
    CHECK(std::abs(psim(2) + r) < 1e-15);
    for (BellKind k : {BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus, BellKind::psi_minus}) {
        CHECK(parse_bell_kind(to_string(k)) == k);
        const Eigen::Matrix2cd c = bell_coefficients(k);
        const Vector v = bell_state(k).amplitudes;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(c(a, b) == v(2 * a + b));
    }
    CHECK(parse_bell_kind("PSI_PLUS") == BellKind::psi_plus);
    CHECK(parse_bell_kind("phi+") == BellKind::phi_plus);
    CHECK_THROWS_AS(parse_bell_kind("ghz"), InvalidInput);
}

TEST_CASE("thermal single-mode weights follow the Boltzmann ratio") {
    ModelParams p;
    p.n_max = 30;
    p.temperature = 1.0 * p.omega[0];  // E / T = 0.2 / 0.4
    const auto w = single_mode_weights(p, 1);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t n = 0; n + 1 < w.size(); ++n) CHECK(w[n + 1] / w[n] == doctest::Approx(std::exp(-0.5)));

    ModelParams cold;
    const auto v = single_mode_weights(cold, 2);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);
}

TEST_CASE("thermal terms: cutoff, renormalisation and ordering") {
    ModelParams p;
    p.n_max = 20;
    p.temperature = 0.25 * p.omega[0];
    const auto terms = thermal_terms(p, 1e-8);
    double total = 0.0;
    for (const auto& t : terms) {
        total += t.weight;
        CHECK(t.energy == doctest::Approx(0.2 * (t.occupations[0] + t.occupations[1])));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(terms.front().occupations == std::array<int, 2>{0, 0});
    for (std::size_t k = 1; k < terms.size(); ++k) {
        const int prev = terms[k - 1].occupations[0] + terms[k - 1].occupations[1];
        const int cur = terms[k].occupations[0] + terms[k].occupations[1];
        CHECK(prev <= cur);
    }
    // purity of the two-mode Gibbs state is (sum_n w_n^2)^2
    const auto w = single_mode_weights(p, 1);
    double s2 = 0.0;
    for (double x : w) s2 += x * x;
    double purity = 0.0;
    for (const auto& t : thermal_terms(p, 0.0)) purity += t.weight * t.weight;
    CHECK(purity == doctest::Approx(s2 * s2).epsilon(1e-12));
}

TEST_CASE("Fock cutoff from the thermal tail") {
    ModelParams p;
    p.temperature = 1.0 * p.omega[0];
    // smallest N with exp(-0.5 N) <= 1e-8
    CHECK(thermal_fock_cutoff(p, 1e-8) == 37);
    p.temperature = 0.25 * p.omega[0];
    CHECK(thermal_fock_cutoff(p, 1e-8) == 10);
}

TEST_CASE("initial density matrix") {
    ModelParams p;
    p.n_max = 3;
    p.temperature = 0.5 * p.omega[0];
    const SpaceLayout l = SpaceLayout::atoms_and_modes(3);
    const Matrix rho = initial_density(BellKind::psi_plus, BathKind::thermal, p, l).entries;
    CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
    CHECK(hermiticity_error(rho) == 0.0);
    const std::vector<int> atoms{factor::atom1, factor::atom2};
    CHECK(max_abs(partial_trace(rho, atoms, l) - projector(bell_state(BellKind::psi_plus).amplitudes)) < 1e-14);
    const Matrix vac = initial_density(BellKind::phi_plus, BathKind::vacuum, p, l).entries;
    CHECK(vac(0, 0).real() == doctest::Approx(0.5));
}
