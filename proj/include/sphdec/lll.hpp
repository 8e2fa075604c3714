#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "sphdec/errors.hpp"
#include "sphdec/matrix.hpp"

namespace sphdec {

// A reduced basis of the same lattice: g_reduced = unimodular * g, with
// unimodular an integer matrix of determinant +-1 and unimodular_inv its
// exact integer inverse.
struct reduced_basis {
    matrix g_reduced;
    std::vector<std::vector<long long>> unimodular;
    std::vector<std::vector<long long>> unimodular_inv;
};

// Lattice basis reduction with parameter delta in (1/4, 1]: size-reduces
// each row against the rows before it and swaps adjacent rows while the
// Lovasz condition fails. Gram-Schmidt data is kept incrementally; the
// classical update formulas are applied on every swap.
inline reduced_basis lll_reduce(const matrix& g, double delta = 0.75) {
    const std::size_t n = g.rows();
    const std::size_t m = g.cols();
    if (n == 0) throw argument_error("lll_reduce: empty basis");
    if (n > m) throw argument_error("lll_reduce: more rows than columns");
    if (!(delta > 0.25 && delta <= 1.0)) throw argument_error("lll_reduce: delta must be in (1/4, 1]");
    if (!all_finite(g)) throw argument_error("lll_reduce: non-finite entry");

    matrix b = g;
    std::vector<std::vector<long long>> uni(n, std::vector<long long>(n, 0));
    std::vector<std::vector<long long>> uni_inv(n, std::vector<long long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) uni[i][i] = uni_inv[i][i] = 1;

    // Gram-Schmidt coefficients mu and squared norms bs of the orthogonal
    // vectors, computed once up front (modified Gram-Schmidt), then
    // maintained through the row operations.
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
    std::vector<double> bs(n, 0.0);
    {
        std::vector<std::vector<double>> star(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < m; ++k) star[i][k] = b(i, k);
            for (std::size_t j = 0; j < i; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < m; ++k) dot += star[i][k] * star[j][k];
                const double f = dot / bs[j];
                mu[i][j] = f;
                for (std::size_t k = 0; k < m; ++k) star[i][k] -= f * star[j][k];
            }
            double nrm2 = 0.0, row2 = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                nrm2 += star[i][k] * star[i][k];
                row2 += b(i, k) * b(i, k);
            }
            if (!(nrm2 > 1e-20 * row2) || row2 == 0.0)
                throw rank_error("lll_reduce: rank-deficient basis");
            bs[i] = nrm2;
        }
    }

    auto size_reduce = [&](std::size_t k, std::size_t l) {
        if (std::fabs(mu[k][l]) <= 0.5) return;
        const long long q = llround(mu[k][l]);
        for (std::size_t c = 0; c < m; ++c) b(k, c) -= double(q) * b(l, c);
        for (std::size_t c = 0; c < n; ++c) uni[k][c] -= q * uni[l][c];
        for (std::size_t rr = 0; rr < n; ++rr) uni_inv[rr][l] += q * uni_inv[rr][k];
        for (std::size_t j = 0; j < l; ++j) mu[k][j] -= double(q) * mu[l][j];
        mu[k][l] -= double(q);
    };

    std::size_t k = 1;
    long long guard = 0;
    while (k < n) {
        if (++guard > 50'000'000)
            throw error("lll_reduce: iteration guard tripped");
        size_reduce(k, k - 1);
        if (bs[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1]) {
            for (std::size_t c = 0; c < m; ++c) std::swap(b(k, c), b(k - 1, c));
            std::swap(uni[k], uni[k - 1]);
            for (std::size_t rr = 0; rr < n; ++rr) std::swap(uni_inv[rr][k], uni_inv[rr][k - 1]);
            // Standard Gram-Schmidt bookkeeping for an adjacent swap.
            const double mu_kk1 = mu[k][k - 1];
            const double b_up = bs[k] + mu_kk1 * mu_kk1 * bs[k - 1];
            mu[k][k - 1] = mu_kk1 * bs[k - 1] / b_up;
            bs[k] = bs[k - 1] * bs[k] / b_up;
            bs[k - 1] = b_up;
            for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double t = mu[i][k];
                mu[i][k] = mu[i][k - 1] - mu_kk1 * t;
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
            }
            if (k > 1) --k;
        } else {
            for (std::size_t l = k - 1; l-- > 0;) size_reduce(k, l);
            ++k;
        }
    }

    reduced_basis out;
    out.g_reduced = b;
    out.unimodular = std::move(uni);
    out.unimodular_inv = std::move(uni_inv);
    return out;
}

} // namespace sphdec
