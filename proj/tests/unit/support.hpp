// support.hpp — shared helpers for the unit tests

#pragma once

#include "bellcav/hilbert.hpp"

#include <random>

namespace bellcav::testing {

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
}

inline OperatorMatrix random_hermitian(std::mt19937_64& rng, int dim) {
    const Matrix g = gaussian(rng, dim, dim);
    return {0.5 * (g + g.adjoint()), true};
}

inline Matrix random_density(std::mt19937_64& rng, int dim, int rank) {
    const Matrix g = gaussian(rng, dim, rank);
    const Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace bellcav::testing
