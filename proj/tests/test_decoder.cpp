#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "sphdec/decoder.hpp"
#include "sphdec/oracle.hpp"
#include "sphdec/sampling.hpp"
#include "test_util.hpp"

using namespace sphdec;
using testutil::near_rel;

namespace {

lower_triangular_pair identity_pair(std::size_t n) {
    return pair_from_lower_triangular(matrix::identity(n));
}

} // namespace

TEST(Rounding, NearestWithHalfUpTies) {
    EXPECT_EQ(round_nearest(1.45), 1);
    EXPECT_EQ(round_nearest(-0.5), 0);
    EXPECT_EQ(round_nearest(0.5), 1);
    EXPECT_EQ(round_nearest(-1.5), -1);
    EXPECT_EQ(round_nearest(7.0), 7);
    EXPECT_EQ(round_nearest(-2.51), -3);
}

TEST(Rounding, Clamped) {
    EXPECT_EQ(round_clamped(3.7, -1, 2), 2);
    EXPECT_EQ(round_clamped(0.2, 0, 3), 0);
    EXPECT_EQ(round_clamped(-9.0, 0, 1), 0);
    EXPECT_EQ(round_clamped(0.5, -3, 3), 1);
    EXPECT_THROW(round_clamped(0.0, 1, 0), argument_error);
}

TEST(Rounding, SignStepIsTwoValued) {
    EXPECT_EQ(sign_step(0.0), -1);
    EXPECT_EQ(sign_step(-0.0), -1);
    EXPECT_EQ(sign_step(3.2), 1);
    EXPECT_EQ(sign_step(-7.0), -1);
    EXPECT_EQ(sign_step(0LL), -1);
    EXPECT_EQ(sign_step(-7LL), -1);
    EXPECT_EQ(sign_step(2LL), 1);
}

TEST(DecoderConfig, AlgorithmIdRoundTrip) {
    for (int id = 1; id <= 8; ++id)
        EXPECT_EQ(decoder_config::from_algorithm(id, 0, 1).algorithm_id(), id);
    EXPECT_THROW(decoder_config::from_algorithm(0), argument_error);
    EXPECT_THROW(decoder_config::from_algorithm(9), argument_error);
}

TEST(Decoder, CubicLatticeRoundsComponentwise) {
    const auto pair = identity_pair(2);
    const std::vector<double> r{0.4, -0.3};
    for (int algo : {1, 3, 5, 7}) {
        const decode_result res = decode(decoder_config::from_algorithm(algo), pair, r);
        EXPECT_EQ(res.coefficients, (std::vector<long long>{0, 0})) << algo;
        EXPECT_NEAR(res.squared_distance, 0.25, 1e-12);
    }
}

TEST(Decoder, FiniteRangeClampsOnIdentity) {
    const auto pair = identity_pair(2);
    const std::vector<double> r{-0.2, 0.7};
    for (int algo : {2, 4, 6, 8}) {
        const decode_result res = decode(decoder_config::from_algorithm(algo, 0, 1), pair, r);
        EXPECT_EQ(res.coefficients, (std::vector<long long>{0, 1})) << algo;
        EXPECT_NEAR(res.squared_distance, 0.13, 1e-12);
    }
}

TEST(Decoder, OneDimensionalScaledLattice) {
    matrix g(1, 1);
    g(0, 0) = 2.0;
    const auto pair = pair_from_lower_triangular(g);
    const std::vector<double> r{2.9};
    for (int algo : {1, 3, 5, 7}) {
        const decode_result res = decode(decoder_config::from_algorithm(algo), pair, r);
        EXPECT_EQ(res.coefficients, (std::vector<long long>{1})) << algo;
        EXPECT_NEAR(res.squared_distance, 0.81, 1e-12);
    }
}

TEST(Decoder, InputValidation) {
    const auto pair = identity_pair(2);
    EXPECT_THROW(decoder(decoder_config::from_algorithm(2, 1, 0), pair), argument_error);
    decoder d(decoder_config::from_algorithm(3), pair);
    EXPECT_THROW(d.decode(std::vector<double>{1.0}), argument_error);
    const double nan = std::nan("");
    EXPECT_THROW(d.decode(std::vector<double>{1.0, nan}), argument_error);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(d.decode(std::vector<double>{inf, 0.0}), argument_error);
    EXPECT_THROW(decoder(decoder_config{}, lower_triangular_pair{}), argument_error);
}

TEST(Decoder, AgreesWithExhaustiveSearchLattice) {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const std::size_t n = 2 + seed % 5;
        const auto pair = testutil::random_pair(n, 500 + seed);
        stream_rng rng(600 + seed);
        std::vector<double> coeff(n);
        for (double& c : coeff) c = rng.uniform01() + double(rng.uniform_int(-2, 2));
        const std::vector<double> r = row_times_matrix<double>(coeff, pair.g);
        const oracle_result ref = oracle_lattice(pair.g, pair.h, r);
        for (int algo : {1, 3, 5, 7}) {
            const decode_result res = decode(decoder_config::from_algorithm(algo), pair, r);
            EXPECT_TRUE(near_rel(res.squared_distance, ref.best_sq_dist, 1e-9))
                << "algo " << algo << " seed " << seed;
            if (ref.margin > 1e-6) EXPECT_EQ(res.coefficients, ref.best) << "algo " << algo;
        }
    }
}

TEST(Decoder, AgreesWithExhaustiveSearchFinite) {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const std::size_t n = 2 + seed % 5;
        const std::size_t points = seed % 2 ? 4 : 2;
        const auto pair = testutil::random_pair(n, 700 + seed);
        const auto symbols = pam_symbols(n, points, 800 + seed);
        const std::vector<double> r = pam_received(
            pair.g, symbols, std::sqrt(pam_noise_variance(points, double(seed % 11))), 900 + seed);
        const long long hi = static_cast<long long>(points) - 1;
        const oracle_result ref = oracle_finite(pair.g, r, 0, hi);
        for (int algo : {2, 4, 6, 8}) {
            const decode_result res = decode(decoder_config::from_algorithm(algo, 0, hi), pair, r);
            EXPECT_TRUE(near_rel(res.squared_distance, ref.best_sq_dist, 1e-9))
                << "algo " << algo << " seed " << seed;
            if (ref.margin > 1e-6) EXPECT_EQ(res.coefficients, ref.best) << "algo " << algo;
            for (long long c : res.coefficients) {
                EXPECT_GE(c, 0);
                EXPECT_LE(c, hi);
            }
        }
    }
}

TEST(Decoder, MetricMatchesIndependentRecompute) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 2 + seed % 7;
        const auto pair = testutil::random_pair(n, 1100 + seed);
        const std::vector<double> r = uniform_voronoi_sample(pair, 1200 + seed);
        for (int algo : {1, 3, 5, 7}) {
            const decode_result res = decode(decoder_config::from_algorithm(algo), pair, r);
            const double direct = testutil::metric_sq(pair.g, r, res.coefficients);
            EXPECT_TRUE(near_rel(res.squared_distance, direct, 1e-9));
        }
    }
}

TEST(Decoder, WorkspaceReuseAcrossCalls) {
    const auto pair = testutil::random_pair(5, 1300);
    decoder lazy(decoder_config::from_algorithm(7), pair);
    decoder eager(decoder_config::from_algorithm(3), pair);
    for (std::uint64_t s = 0; s < 40; ++s) {
        const std::vector<double> r = uniform_voronoi_sample(pair, 1400 + s);
        const auto a = lazy.decode(r);
        const auto b = eager.decode(r);
        EXPECT_EQ(a.coefficients, b.coefficients);
        EXPECT_TRUE(near_rel(a.squared_distance, b.squared_distance, 1e-12));
    }
}

TEST(Trace, OneDimensionalEventList) {
    matrix g(1, 1);
    g(0, 0) = 1.0;
    const auto pair = pair_from_lower_triangular(g);
    auto [res, events] = trace_decode(decoder_config::from_algorithm(3), pair, std::vector<double>{0.2});
    EXPECT_EQ(res.coefficients, (std::vector<long long>{0}));
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0], (trace_event{1, 0}));
}

TEST(Trace, IdenticalAcrossLatticeVariants) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 2 + seed % 8;
        const auto pair = testutil::random_pair(n, 1500 + seed);
        const std::vector<double> r = uniform_voronoi_sample(pair, 1600 + seed);
        auto [res1, ev1] = trace_decode(decoder_config::from_algorithm(1), pair, r);
        for (int algo : {3, 5, 7}) {
            auto [res, ev] = trace_decode(decoder_config::from_algorithm(algo), pair, r);
            EXPECT_EQ(ev, ev1) << "algo " << algo << " seed " << seed;
            EXPECT_EQ(res.coefficients, res1.coefficients);
        }
    }
}

TEST(Trace, IdenticalAcrossFiniteVariants) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 2 + seed % 8;
        const std::size_t points = seed % 2 ? 4 : 2;
        const long long hi = static_cast<long long>(points) - 1;
        const auto pair = testutil::random_pair(n, 1700 + seed);
        const auto symbols = pam_symbols(n, points, 1800 + seed);
        const std::vector<double> r =
            pam_received(pair.g, symbols, std::sqrt(pam_noise_variance(points, 0.0)), 1900 + seed);
        auto [res2, ev2] = trace_decode(decoder_config::from_algorithm(2, 0, hi), pair, r);
        for (int algo : {4, 6, 8}) {
            auto [res, ev] = trace_decode(decoder_config::from_algorithm(algo, 0, hi), pair, r);
            EXPECT_EQ(ev, ev2) << "algo " << algo << " seed " << seed;
            EXPECT_EQ(res.coefficients, res2.coefficients);
        }
    }
}

TEST(Trace, SameResultAsPlainDecode) {
    const auto pair = testutil::random_pair(6, 2000);
    const std::vector<double> r = uniform_voronoi_sample(pair, 2001);
    decoder d(decoder_config::from_algorithm(5), pair);
    const auto plain = d.decode(r);
    const auto traced = d.trace_decode(r);
    EXPECT_EQ(plain.coefficients, traced.first.coefficients);
    EXPECT_EQ(plain.squared_distance, traced.first.squared_distance);
    EXPECT_EQ(plain.ops, traced.first.ops);
}

// Candidates at a layer form the zig-zag schedule: first the rounded
// center, then offsets alternating in sign with growing magnitude. A new
// run starts whenever the layer is entered from above.
TEST(Trace, ZigZagSchedule) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 2 + seed % 6;
        const auto pair = testutil::random_pair(n, 2100 + seed);
        const std::vector<double> r = uniform_voronoi_sample(pair, 2200 + seed);
        auto [res, events] = trace_decode(decoder_config::from_algorithm(1), pair, r);
        std::vector<std::vector<long long>> runs(n + 2);
        int prev_layer = std::numeric_limits<int>::max();
        for (const trace_event& e : events) {
            auto& run = runs[static_cast<std::size_t>(e.layer)];
            if (prev_layer > e.layer) run.clear();
            run.push_back(e.candidate);
            prev_layer = e.layer;
            const std::size_t k = run.size() - 1;
            if (k == 0) continue;
            const long long off = run[k] - run[0];
            ASSERT_NE(off, 0) << "zero step at layer " << e.layer;
            const long long first = run[1] - run[0];
            ASSERT_TRUE(first == 1 || first == -1);
            const long long magnitude = static_cast<long long>((k + 1) / 2);
            const long long want = (k % 2 ? magnitude : -magnitude) * first;
            ASSERT_EQ(off, want) << "layer " << e.layer << " position " << k;
        }
    }
}

// Shadow check of the cached projection bookkeeping: within each pair the
// eager variant recomputes what the lazy variant caches, on the same
// search path, with the same operation order, so the per-iteration
// projection values must match bit for bit.
TEST(Audit, LazyProjectionsMatchEagerBitForBit) {
    const std::pair<int, int> pairs[4] = {{1, 5}, {3, 7}, {2, 6}, {4, 8}};
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 2 + seed % 8;
        const auto pair = testutil::random_pair(n, 2300 + seed);
        for (auto [eager_id, lazy_id] : pairs) {
            const bool finite = eager_id % 2 == 0;
            std::vector<double> r;
            if (finite) {
                const auto symbols = pam_symbols(n, 2, 2400 + seed);
                r = pam_received(pair.g, symbols, std::sqrt(pam_noise_variance(2, 5.0)),
                                 2500 + seed);
            } else {
                r = uniform_voronoi_sample(pair, 2600 + seed);
            }
            decoder a(decoder_config::from_algorithm(eager_id, 0, 1), pair);
            decoder b(decoder_config::from_algorithm(lazy_id, 0, 1), pair);
            auto [res_a, data_a] = a.audit_decode(r);
            auto [res_b, data_b] = b.audit_decode(r);
            ASSERT_EQ(data_a.layers.size(), data_b.layers.size());
            for (std::size_t k = 0; k < data_a.layers.size(); ++k) {
                EXPECT_EQ(data_a.layers[k].layer, data_b.layers[k].layer);
                EXPECT_EQ(data_a.layers[k].candidate, data_b.layers[k].candidate);
                EXPECT_EQ(data_a.layers[k].projection, data_b.layers[k].projection)
                    << "pair " << eager_id << ":" << lazy_id << " iteration " << k;
            }
        }
    }
}

// Accumulated squared distances evolve exactly as dist = tail + disp^2
// along every examined layer.
TEST(Audit, DistanceRecursion) {
    const auto pair = testutil::random_pair(6, 2700);
    for (int algo : {1, 3, 5, 7}) {
        decoder d(decoder_config::from_algorithm(algo), pair);
        const std::vector<double> r = uniform_voronoi_sample(pair, 2701);
        auto [res, data] = d.audit_decode(r);
        ASSERT_FALSE(data.layers.empty());
        for (const audit_event& e : data.layers) {
            if (std::isinf(e.displacement)) {
                EXPECT_TRUE(std::isinf(e.dist_here));
            } else {
                EXPECT_EQ(e.dist_here, e.dist_tail + e.displacement * e.displacement);
                EXPECT_GE(e.dist_here, e.dist_tail);
            }
        }
    }
}
