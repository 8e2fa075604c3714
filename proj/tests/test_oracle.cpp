#include <gtest/gtest.h>

#include <cmath>

#include "sphdec/decoder.hpp"
#include "sphdec/oracle.hpp"
#include "sphdec/sampling.hpp"
#include "test_util.hpp"

using namespace sphdec;
using testutil::near_rel;

namespace {

// Independent plain brute force over a fixed coefficient cube, used to
// cross-check the oracle itself on tiny cases.
oracle_result cube_brute_force(const matrix& g, std::span<const double> r, long long radius) {
    const std::size_t n = g.rows();
    std::vector<long long> u(n, -radius);
    oracle_result out;
    out.best_sq_dist = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (;;) {
        const double d = testutil::metric_sq(g, r, u);
        if (d < out.best_sq_dist) {
            second = out.best_sq_dist;
            out.best_sq_dist = d;
            out.best = u;
        } else if (d < second) {
            second = d;
        }
        std::size_t k = 0;
        while (k < n && u[k] == radius) u[k++] = -radius;
        if (k == n) break;
        ++u[k];
    }
    out.margin = second - out.best_sq_dist;
    return out;
}

} // namespace

TEST(OracleFinite, HandExample) {
    const auto pair = pair_from_lower_triangular(matrix::identity(2));
    const oracle_result res = oracle_finite(pair.g, std::vector<double>{-0.2, 0.7}, 0, 1);
    EXPECT_EQ(res.best, (std::vector<long long>{0, 1}));
    EXPECT_NEAR(res.best_sq_dist, 0.13, 1e-12);
    EXPECT_GT(res.margin, 1e-6);
}

TEST(OracleFinite, MatchesFiniteDecoders) {
    {
        const auto pair = testutil::random_pair(10, 4000);
        const auto symbols = pam_symbols(10, 2, 4001);
        const auto r = pam_received(pair.g, symbols, std::sqrt(pam_noise_variance(2, 5.0)), 4002);
        const oracle_result ref = oracle_finite(pair.g, r, 0, 1);
        const decode_result res = decode(decoder_config::from_algorithm(6, 0, 1), pair, r);
        EXPECT_TRUE(near_rel(res.squared_distance, ref.best_sq_dist, 1e-9));
        if (ref.margin > 1e-6) EXPECT_EQ(res.coefficients, ref.best);
    }
    {
        const auto pair = testutil::random_pair(6, 4010);
        const auto symbols = pam_symbols(6, 4, 4011);
        const auto r = pam_received(pair.g, symbols, std::sqrt(pam_noise_variance(4, 5.0)), 4012);
        const oracle_result ref = oracle_finite(pair.g, r, 0, 3);
        const decode_result res = decode(decoder_config::from_algorithm(8, 0, 3), pair, r);
        EXPECT_TRUE(near_rel(res.squared_distance, ref.best_sq_dist, 1e-9));
        if (ref.margin > 1e-6) EXPECT_EQ(res.coefficients, ref.best);
    }
}

TEST(OracleFinite, GuardsAndValidation) {
    const auto pair = pair_from_lower_triangular(matrix::identity(9));
    std::vector<double> r(9, 0.1);
    EXPECT_THROW(oracle_finite(pair.g, r, 0, 9), size_error); // 10^9 grid points
    EXPECT_THROW(oracle_finite(pair.g, r, 1, 0), argument_error);
}

TEST(OracleLattice, TieResolvesTowardLargerCoefficient) {
    const auto pair = pair_from_lower_triangular(matrix::identity(3));
    const oracle_result res =
        oracle_lattice(pair.g, pair.h, std::vector<double>{0.2, -0.4, 0.5});
    EXPECT_EQ(res.best, (std::vector<long long>{0, 0, 1}));
    EXPECT_NEAR(res.best_sq_dist, 0.45, 1e-12);
    EXPECT_LE(res.margin, 1e-12); // the tie shows up as a zero margin
}

TEST(OracleLattice, MatchesIndependentCubeSweep) {
    matrix g(2, 2);
    g(0, 0) = 2.0;
    g(1, 0) = 1.0; g(1, 1) = 1.0;
    const std::vector<double> r{1.1, 0.9};
    const oracle_result want = cube_brute_force(g, r, 4);
    const oracle_result got = oracle_lattice(g, invert_lower_triangular(g), r);
    EXPECT_EQ(got.best, want.best);
    EXPECT_TRUE(near_rel(got.best_sq_dist, want.best_sq_dist, 1e-12));
}

TEST(OracleLattice, ExactLatticePointRecovered) {
    const auto pair = testutil::random_pair(5, 4100);
    const std::vector<long long> u{3, -2, 0, 1, -4};
    const std::vector<double> r = row_times_matrix<long long>(u, pair.g);
    const oracle_result res = oracle_lattice(pair.g, pair.h, r);
    EXPECT_EQ(res.best, u);
    EXPECT_LE(res.best_sq_dist, 1e-16);
}

TEST(OracleLattice, StartingPointBoundsTheOptimum) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 2 + seed % 6;
        const auto pair = testutil::random_pair(n, 4200 + seed);
        const std::vector<double> r = uniform_voronoi_sample(pair, 4300 + seed);
        const auto rounded = babai_round(pair.h, r);
        const auto planes = babai_nearest_plane(pair.g, r);
        const oracle_result res = oracle_lattice(pair.g, pair.h, r);
        EXPECT_LE(res.best_sq_dist, testutil::metric_sq(pair.g, r, rounded) + 1e-12);
        EXPECT_LE(res.best_sq_dist, testutil::metric_sq(pair.g, r, planes) + 1e-12);
    }
}

TEST(OracleLattice, SkewedBasisFallsBackToReducedSearch) {
    // In this basis the direct search box spans ~1e11 candidates, so the
    // oracle must switch to a reduced basis of the same lattice. The input
    // sits a known hair away from a lattice point with large coefficients.
    matrix g(2, 2);
    g(0, 0) = 1.0;
    g(1, 0) = 0.9999; g(1, 1) = 1e-7;
    const std::vector<long long> truth{3141, -3141};
    std::vector<double> r = row_times_matrix<long long>(truth, g);
    r[0] += 1e-9;
    r[1] += 2e-10;
    const oracle_result got = oracle_lattice(g, invert_lower_triangular(g), r);
    EXPECT_EQ(got.best, truth);
    EXPECT_LE(got.best_sq_dist, 2e-18);
    EXPECT_GT(got.margin, 1e-9);
}

TEST(BabaiNearestPlane, HandValue) {
    matrix g(2, 2);
    g(0, 0) = 2.0;
    g(1, 0) = 1.0; g(1, 1) = 4.0;
    // Top layer: round(3.9 / 4) = 1; peel row 1, then round(2.6 - 1 = 1.6 over 2) = 1.
    const auto u = babai_nearest_plane(g, std::vector<double>{2.6, 3.9});
    EXPECT_EQ(u, (std::vector<long long>{1, 1}));
}
