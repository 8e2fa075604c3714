#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sphdec/errors.hpp"
#include "sphdec/matrix.hpp"

namespace sphdec {

// Canonical basis form consumed by the decoders: g is square lower
// triangular with positive diagonal, h is its inverse (also lower
// triangular with positive diagonal).
struct lower_triangular_pair {
    matrix g;
    matrix h;

    std::size_t dimension() const { return g.rows(); }
};

inline bool is_lower_triangular(const matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != 0.0) return false;
    return true;
}

inline bool has_positive_diagonal(const matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!(m(i, i) > 0.0)) return false;
    return true;
}

// Inverse of a lower triangular matrix by forward substitution, one column
// at a time. The result is lower triangular; a positive input diagonal
// yields a positive output diagonal.
inline matrix invert_lower_triangular(const matrix& g) {
    const std::size_t n = g.rows();
    if (n == 0 || g.cols() != n) throw argument_error("invert_lower_triangular: square matrix required");
    for (std::size_t i = 0; i < n; ++i)
        if (g(i, i) == 0.0) throw singular_error("invert_lower_triangular: zero diagonal entry");
    matrix h(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        h(j, j) = 1.0 / g(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s += g(i, k) * h(k, j);
            h(i, j) = -s / g(i, i);
        }
    }
    return h;
}

// Lower-triangularizes an arbitrary full-row-rank basis (n rows, m >= n
// columns) by a Householder QR factorization of its transpose:
//
//   basis^T = Q R  =>  basis = R^T Q^T,
//
// so g = R^T has the same Gram matrix as the input and spans the same
// lattice up to a rotation of the ambient space. Rows of R are flipped in
// sign where needed to make the diagonal positive (a reflection of the
// orthogonal factor, which leaves the Gram matrix unchanged).
//
// Throws rank_error when a diagonal pivot falls below 1e-12 times the
// largest pivot.
inline lower_triangular_pair lower_triangularize(const matrix& basis) {
    const std::size_t n = basis.rows();
    const std::size_t m = basis.cols();
    if (n == 0) throw argument_error("lower_triangularize: empty basis");
    if (n > m) throw argument_error("lower_triangularize: more rows than columns");
    if (!all_finite(basis)) throw argument_error("lower_triangularize: non-finite entry");

    matrix a = transpose(basis); // m x n, to be reduced in place
    std::vector<double> diag(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm = std::hypot(norm, a(i, k));
        if (norm != 0.0) {
            if (a(k, k) < 0.0) norm = -norm;
            for (std::size_t i = k; i < m; ++i) a(i, k) /= norm;
            a(k, k) += 1.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += a(i, k) * a(i, j);
                s = -s / a(k, k);
                for (std::size_t i = k; i < m; ++i) a(i, j) += s * a(i, k);
            }
        }
        diag[k] = -norm;
    }

    double largest = 0.0;
    for (std::size_t k = 0; k < n; ++k) largest = std::max(largest, std::fabs(diag[k]));
    for (std::size_t k = 0; k < n; ++k)
        if (std::fabs(diag[k]) <= 1e-12 * largest || diag[k] == 0.0)
            throw rank_error("lower_triangularize: rank-deficient basis");

    // g(i, j) = R(j, i); row j of R lives in diag[j] and a(j, j+1..n-1).
    matrix g(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double flip = diag[j] < 0.0 ? -1.0 : 1.0;
        g(j, j) = flip * diag[j];
        for (std::size_t i = j + 1; i < n; ++i) g(i, j) = flip * a(j, i);
    }
    return lower_triangular_pair{g, invert_lower_triangular(g)};
}

// Wraps a matrix that is already in canonical form.
inline lower_triangular_pair pair_from_lower_triangular(const matrix& g) {
    if (!is_lower_triangular(g)) throw argument_error("pair_from_lower_triangular: not lower triangular");
    if (!has_positive_diagonal(g)) throw argument_error("pair_from_lower_triangular: diagonal must be positive");
    return lower_triangular_pair{g, invert_lower_triangular(g)};
}

} // namespace sphdec
