#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "sphdec/decoder.hpp"
#include "sphdec/oracle.hpp"
#include "sphdec/sampling.hpp"
#include "sphdec/triangular.hpp"

namespace sphdec {

struct verify_outcome {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0; // instances whose oracle exceeded the size guard
    std::string first_failure;

    void merge(const verify_outcome& o) {
        checks += o.checks;
        failures += o.failures;
        skipped += o.skipped;
        if (first_failure.empty()) first_failure = o.first_failure;
    }
};

namespace detail {

inline bool sq_dist_close(double a, double b) {
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline void record_failure(verify_outcome& out, const std::string& what) {
    ++out.failures;
    if (out.first_failure.empty()) out.first_failure = what;
}

// A probe input near the lattice: a fractional position inside the
// fundamental cell plus a small random integer shift, so the distance to
// the lattice stays bounded and the reference search box stays small.
inline std::vector<double> probe_point(const lower_triangular_pair& pair, std::uint64_t key) {
    const std::size_t n = pair.dimension();
    stream_rng rng(key);
    std::vector<double> coeff(n);
    for (double& c : coeff) c = rng.uniform01() + double(rng.uniform_int(-2, 2));
    return row_times_matrix<double>(coeff, pair.g);
}

} // namespace detail

// Decodes `trials` random probe points per dimension with every lattice
// algorithm and compares each result against the exhaustive reference:
// squared distances must agree to 1e-9 relative, and the coefficient
// vectors must agree exactly whenever the reference certifies a unique
// minimizer by margin > 1e-6.
inline verify_outcome verify_lattice_algorithms(const std::vector<std::size_t>& dims,
                                                std::size_t trials, std::uint64_t seed) {
    verify_outcome out;
    for (std::size_t n : dims) {
        for (std::size_t t = 0; t < trials; ++t) {
            const matrix basis =
                random_gaussian_matrix(n, derive_key(seed, {key_part(stream_tag::probe_point), n, t}));
            const lower_triangular_pair pair = lower_triangularize(basis);
            const std::vector<double> r = detail::probe_point(
                pair, derive_key(seed, {key_part(stream_tag::probe_point), n, t, 1}));
            oracle_result ref;
            try {
                ref = oracle_lattice(pair.g, pair.h, r);
            } catch (const size_error&) {
                ++out.skipped;
                continue;
            }
            for (int algo : {1, 3, 5, 7}) {
                ++out.checks;
                const decode_result res = decode(decoder_config::from_algorithm(algo), pair, r);
                const bool dist_ok = detail::sq_dist_close(res.squared_distance, ref.best_sq_dist);
                const bool point_ok = ref.margin <= 1e-6 || res.coefficients == ref.best;
                if (!dist_ok || !point_ok) {
                    std::ostringstream msg;
                    msg << "lattice algorithm " << algo << " vs reference: n=" << n
                        << " trial=" << t << " seed=" << seed << " got=" << res.squared_distance
                        << " want=" << ref.best_sq_dist;
                    detail::record_failure(out, msg.str());
                }
            }
        }
    }
    return out;
}

struct finite_case {
    std::size_t n = 0;
    std::size_t points = 2;
    std::size_t trials = 0;
};

// Same contract for the finite-range algorithms against the full-grid
// reference, over channel observations at a rotating set of SNRs.
inline verify_outcome verify_finite_algorithms(const std::vector<finite_case>& cases,
                                               std::uint64_t seed) {
    const double snrs[3] = {0.0, 5.0, 10.0};
    verify_outcome out;
    for (const finite_case& fc : cases) {
        const long long hi = static_cast<long long>(fc.points) - 1;
        for (std::size_t t = 0; t < fc.trials; ++t) {
            const matrix basis = random_gaussian_matrix(
                fc.n, derive_key(seed, {key_part(stream_tag::probe_point), fc.n, fc.points, t}));
            const lower_triangular_pair pair = lower_triangularize(basis);
            const double snr = snrs[t % 3];
            const auto symbols =
                pam_symbols(fc.n, fc.points,
                            derive_key(seed, {key_part(stream_tag::pam_symbols), fc.n, fc.points, t}));
            const std::vector<double> r =
                pam_received(pair.g, symbols, std::sqrt(pam_noise_variance(fc.points, snr)),
                             derive_key(seed, {key_part(stream_tag::awgn), fc.n, fc.points, t}));
            oracle_result ref;
            try {
                ref = oracle_finite(pair.g, r, 0, hi);
            } catch (const size_error&) {
                ++out.skipped;
                continue;
            }
            for (int algo : {2, 4, 6, 8}) {
                ++out.checks;
                const decode_result res =
                    decode(decoder_config::from_algorithm(algo, 0, hi), pair, r);
                const bool dist_ok = detail::sq_dist_close(res.squared_distance, ref.best_sq_dist);
                const bool point_ok = ref.margin <= 1e-6 || res.coefficients == ref.best;
                if (!dist_ok || !point_ok) {
                    std::ostringstream msg;
                    msg << "finite algorithm " << algo << " vs reference: n=" << fc.n
                        << " L=" << fc.points << " trial=" << t << " seed=" << seed;
                    detail::record_failure(out, msg.str());
                }
            }
        }
    }
    return out;
}

} // namespace sphdec
