#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sphdec/lll.hpp"
#include "sphdec/sampling.hpp"
#include "sphdec/triangular.hpp"
#include "test_util.hpp"

using namespace sphdec;

namespace {

double row_norm_sq(const matrix& m, std::size_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) s += m(i, k) * m(i, k);
    return s;
}

// |det| through the triangularization diagonal (covolume).
double abs_det(const matrix& m) {
    const auto pair = lower_triangularize(m);
    double d = 1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) d *= pair.g(i, i);
    return d;
}

matrix recompose(const reduced_basis& red, const matrix& g) {
    const std::size_t n = g.rows();
    matrix out(n, g.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < g.cols(); ++k)
                out(i, k) += double(red.unimodular[i][j]) * g(j, k);
    return out;
}

} // namespace

TEST(Lll, IdentityIsAlreadyReduced) {
    const auto red = lll_reduce(matrix::identity(4));
    EXPECT_EQ(max_abs_diff(red.g_reduced, matrix::identity(4)), 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(red.unimodular[i][j], i == j ? 1 : 0);
            EXPECT_EQ(red.unimodular_inv[i][j], i == j ? 1 : 0);
        }
}

TEST(Lll, AgreesWithNaiveReferenceOnSkewedBasis) {
    matrix b(2, 2);
    b(0, 0) = 1.0; b(0, 1) = 0.0;
    b(1, 0) = 0.5; b(1, 1) = 0.001;
    const auto red = lll_reduce(b, 0.75);
    const matrix ref = testutil::reference_lll(b, 0.75);

    // Same reduced vectors, possibly reordered or negated.
    for (std::size_t i = 0; i < 2; ++i) {
        bool found = false;
        for (std::size_t j = 0; j < 2 && !found; ++j) {
            const bool same = std::fabs(red.g_reduced(i, 0) - ref(j, 0)) < 1e-9 &&
                              std::fabs(red.g_reduced(i, 1) - ref(j, 1)) < 1e-9;
            const bool negated = std::fabs(red.g_reduced(i, 0) + ref(j, 0)) < 1e-9 &&
                                 std::fabs(red.g_reduced(i, 1) + ref(j, 1)) < 1e-9;
            found = same || negated;
        }
        EXPECT_TRUE(found) << "row " << i << " not matched by the reference reduction";
    }

    // First vector beats the classical n = 2 quality bound.
    EXPECT_LE(row_norm_sq(red.g_reduced, 0), std::sqrt(2.0) * abs_det(b) + 1e-12);
}

TEST(Lll, PermutedOrthogonalBasisKeepsNorms) {
    matrix b(3, 3);
    b(0, 2) = 4.0;
    b(1, 0) = 2.0;
    b(2, 1) = 1.0;
    const auto red = lll_reduce(b);
    std::vector<double> in{row_norm_sq(b, 0), row_norm_sq(b, 1), row_norm_sq(b, 2)};
    std::vector<double> out{row_norm_sq(red.g_reduced, 0), row_norm_sq(red.g_reduced, 1),
                            row_norm_sq(red.g_reduced, 2)};
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(in[i], out[i], 1e-12);
}

TEST(Lll, InvariantsOnRandomBases) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const std::size_t n = 2 + seed % 11;
        const matrix b = random_gaussian_matrix(n, seed);
        const auto red = lll_reduce(b);

        // Same lattice: integer transform of determinant +-1 recomposes the
        // reduced basis, and the covolume is untouched.
        EXPECT_LE(max_abs_diff(recompose(red, b), red.g_reduced),
                  1e-9 * std::max(1.0, max_abs(red.g_reduced)));
        const long long det_u = testutil::integer_det(red.unimodular);
        EXPECT_TRUE(det_u == 1 || det_u == -1) << "det " << det_u;
        EXPECT_TRUE(testutil::near_rel(abs_det(red.g_reduced), abs_det(b), 1e-8));

        // The advertised reduction properties hold for the output.
        EXPECT_TRUE(testutil::is_lll_reduced(red.g_reduced, 0.75));

        // Exact integer inverse.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                long long s = 0;
                for (std::size_t k = 0; k < n; ++k)
                    s += red.unimodular[i][k] * red.unimodular_inv[k][j];
                EXPECT_EQ(s, i == j ? 1 : 0);
            }
    }
}

TEST(Lll, Idempotent) {
    const matrix b = random_gaussian_matrix(8, 7);
    const auto once = lll_reduce(b);
    const auto twice = lll_reduce(once.g_reduced);
    EXPECT_EQ(max_abs_diff(twice.g_reduced, once.g_reduced), 0.0);
}

TEST(Lll, InputValidation) {
    EXPECT_THROW(lll_reduce(matrix::identity(2), 0.25), argument_error);
    EXPECT_THROW(lll_reduce(matrix::identity(2), 1.5), argument_error);
    EXPECT_THROW(lll_reduce(matrix(0, 0)), argument_error);
    matrix dep(2, 2);
    dep(0, 0) = 1.0; dep(0, 1) = 2.0;
    dep(1, 0) = 2.0; dep(1, 1) = 4.0;
    EXPECT_THROW(lll_reduce(dep), rank_error);
}
