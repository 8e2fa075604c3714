#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sphdec/decoder.hpp"
#include "sphdec/errors.hpp"
#include "sphdec/lll.hpp"
#include "sphdec/matrix.hpp"
#include "sphdec/sampling.hpp"
#include "sphdec/triangular.hpp"

namespace sphdec {

enum class instance_family { lattice, finite };

// One measurement campaign: M random bases per dimension, N inputs per
// basis, every input decoded by both members of each algorithm pair.
struct experiment_spec {
    instance_family family = instance_family::lattice;
    std::vector<std::size_t> dims;
    std::size_t matrices = 20;  // M
    std::size_t vectors = 0;    // N; 0 picks the per-dimension schedule below
    std::size_t constellation = 2;
    double snr_db = 0.0;
    bool lll = false;
    double lll_delta = 0.75;
    std::vector<std::pair<int, int>> pairs; // empty picks the family default
    std::uint64_t seed = 1;
    bool allow_slow = false;
    std::size_t workers = 0; // 0: SPHDEC_WORKERS env var, then hardware
};

// Fewer inputs at higher dimension, floored at 20 per basis.
inline std::size_t default_vector_count(std::size_t n) {
    const auto sched = static_cast<std::size_t>(std::llround(20000.0 / (double(n) * double(n))));
    return sched < 20 ? 20 : sched;
}

struct pair_matrix_totals {
    std::uint64_t old_flops = 0;
    std::uint64_t old_intops = 0;
    std::uint64_t new_flops = 0;
    std::uint64_t new_intops = 0;
};

struct gain_cell {
    std::size_t n = 0;
    int algo_old = 0;
    int algo_new = 0;
    std::size_t vectors = 0;
    std::vector<pair_matrix_totals> per_matrix; // one entry per basis
    double flop_gain = 0.0;
    double intop_gain = 0.0;
};

struct gain_report {
    experiment_spec spec;
    std::vector<gain_cell> cells;
};

// Mean over bases of the per-basis ratio of summed operation counts. The
// per-basis sums must be formed first; averaging per-input ratios is a
// different (wrong) statistic.
inline double gain(std::span<const std::uint64_t> old_totals,
                   std::span<const std::uint64_t> new_totals) {
    if (old_totals.size() != new_totals.size() || old_totals.empty())
        throw argument_error("gain: totals must be nonempty and of equal length");
    double acc = 0.0;
    for (std::size_t j = 0; j < old_totals.size(); ++j) {
        if (new_totals[j] == 0) throw argument_error("gain: zero denominator");
        acc += double(old_totals[j]) / double(new_totals[j]);
    }
    return acc / double(old_totals.size());
}

namespace detail {

inline std::size_t worker_count(std::size_t requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("SPHDEC_WORKERS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

inline void validate_spec(const experiment_spec& spec) {
    if (spec.dims.empty()) throw argument_error("experiment: no dimensions given");
    if (spec.matrices == 0) throw argument_error("experiment: need at least one basis");
    if (spec.family == instance_family::finite) {
        if (spec.lll)
            throw argument_error("experiment: basis reduction would break the finite range constraint");
        if (spec.constellation < 2) throw argument_error("experiment: constellation needs >= 2 points");
    } else if (!spec.lll && !spec.allow_slow) {
        for (std::size_t n : spec.dims)
            if (n > 40)
                throw argument_error(
                    "experiment: unreduced lattice decoding above n = 40 grows explosively; "
                    "pass allow_slow to run it anyway");
    }
    const bool lattice = spec.family == instance_family::lattice;
    for (auto [o, nw] : spec.pairs) {
        const decoder_config a = decoder_config::from_algorithm(o);
        const decoder_config b = decoder_config::from_algorithm(nw);
        if (a.finite == lattice || b.finite == lattice)
            throw argument_error("experiment: algorithm domain does not match the family");
    }
}

struct basis_job_result {
    std::vector<pair_matrix_totals> per_pair; // one slot per configured pair
    std::optional<std::string> failure;
};

} // namespace detail

// Runs the campaign. Both members of a pair decode identical inputs; any
// disagreement on the decoded point aborts the run with the instance
// coordinates in the message. Results are a pure function of the spec,
// independent of the worker count.
inline gain_report run_experiment(const experiment_spec& spec_in) {
    experiment_spec spec = spec_in;
    if (spec.pairs.empty()) {
        spec.pairs = spec.family == instance_family::lattice
                         ? std::vector<std::pair<int, int>>{{1, 5}, {3, 7}}
                         : std::vector<std::pair<int, int>>{{2, 6}, {4, 8}};
    }
    detail::validate_spec(spec);

    const bool lattice = spec.family == instance_family::lattice;
    const std::size_t n_dims = spec.dims.size();
    const std::size_t n_pairs = spec.pairs.size();
    const std::size_t jobs = n_dims * spec.matrices;
    std::vector<detail::basis_job_result> slots(jobs);

    auto run_job = [&](std::size_t job) {
        const std::size_t d = job / spec.matrices;
        const std::size_t j = job % spec.matrices;
        const std::size_t n = spec.dims[d];
        const std::size_t vectors = spec.vectors ? spec.vectors : default_vector_count(n);
        detail::basis_job_result& slot = slots[job];
        slot.per_pair.assign(n_pairs, pair_matrix_totals{});
        try {
            const std::uint64_t mat_key =
                derive_key(spec.seed, {key_part(stream_tag::gaussian_matrix), n, j});
            matrix basis = random_gaussian_matrix(n, mat_key);
            if (lattice && spec.lll) basis = lll_reduce(basis, spec.lll_delta).g_reduced;
            const lower_triangular_pair pair = lower_triangularize(basis);

            std::vector<decoder> old_dec, new_dec;
            old_dec.reserve(n_pairs);
            new_dec.reserve(n_pairs);
            for (auto [o, nw] : spec.pairs) {
                long long lo = 0, hi = 0;
                if (!lattice) {
                    lo = 0;
                    hi = static_cast<long long>(spec.constellation) - 1;
                }
                old_dec.emplace_back(decoder_config::from_algorithm(o, lo, hi), pair);
                new_dec.emplace_back(decoder_config::from_algorithm(nw, lo, hi), pair);
            }
            decoder folding(decoder_config::from_algorithm(3), pair);

            const double sigma =
                lattice ? 0.0 : std::sqrt(pam_noise_variance(spec.constellation, spec.snr_db));
            for (std::size_t i = 0; i < vectors; ++i) {
                std::vector<double> r;
                if (lattice) {
                    r = uniform_voronoi_sample(
                        pair, derive_key(spec.seed, {key_part(stream_tag::voronoi), n, j, i}),
                        folding);
                } else {
                    const auto symbols = pam_symbols(
                        n, spec.constellation,
                        derive_key(spec.seed, {key_part(stream_tag::pam_symbols), n, j, i}));
                    r = pam_received(
                        pair.g, symbols, sigma,
                        derive_key(spec.seed,
                                   {key_part(stream_tag::awgn), n, j, i, key_part(spec.snr_db)}));
                }
                for (std::size_t p = 0; p < n_pairs; ++p) {
                    const decode_result a = old_dec[p].decode(r);
                    const decode_result b = new_dec[p].decode(r);
                    if (a.coefficients != b.coefficients) {
                        std::ostringstream msg;
                        msg << "paired algorithms " << spec.pairs[p].first << " and "
                            << spec.pairs[p].second << " disagree at n=" << n << " matrix=" << j
                            << " vector=" << i << " seed=" << spec.seed;
                        throw mismatch_error(msg.str());
                    }
                    slot.per_pair[p].old_flops += a.ops.flops;
                    slot.per_pair[p].old_intops += a.ops.intops;
                    slot.per_pair[p].new_flops += b.ops.flops;
                    slot.per_pair[p].new_intops += b.ops.intops;
                }
            }
        } catch (const std::exception& e) {
            slot.failure = e.what();
        }
    };

    const std::size_t workers = std::min(detail::worker_count(spec.workers), jobs);
    if (workers <= 1) {
        for (std::size_t job = 0; job < jobs; ++job) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t job = next.fetch_add(1);
                    if (job >= jobs) return;
                    run_job(job);
                }
            });
        for (auto& t : pool) t.join();
    }

    for (const auto& slot : slots)
        if (slot.failure) throw mismatch_error(*slot.failure);

    gain_report report;
    report.spec = spec;
    for (std::size_t d = 0; d < n_dims; ++d) {
        const std::size_t n = spec.dims[d];
        for (std::size_t p = 0; p < n_pairs; ++p) {
            gain_cell cell;
            cell.n = n;
            cell.algo_old = spec.pairs[p].first;
            cell.algo_new = spec.pairs[p].second;
            cell.vectors = spec.vectors ? spec.vectors : default_vector_count(n);
            cell.per_matrix.reserve(spec.matrices);
            std::vector<std::uint64_t> of, nf, oi, ni;
            for (std::size_t j = 0; j < spec.matrices; ++j) {
                const auto& tot = slots[d * spec.matrices + j].per_pair[p];
                cell.per_matrix.push_back(tot);
                of.push_back(tot.old_flops);
                nf.push_back(tot.new_flops);
                oi.push_back(tot.old_intops);
                ni.push_back(tot.new_intops);
            }
            cell.flop_gain = gain(of, nf);
            cell.intop_gain = gain(oi, ni);
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

inline const char* family_name(instance_family f) {
    return f == instance_family::lattice ? "lattice" : "finite";
}

// One row per (dimension, pair, metric). The constellation and SNR columns
// are left empty for the lattice family.
inline void write_gain_csv(std::ostream& out, const gain_report& report) {
    out << "family,n,L,snr_db,reduce,algo_old,algo_new,metric,gain,M,N,seed\n";
    const experiment_spec& s = report.spec;
    const bool lattice = s.family == instance_family::lattice;
    for (const gain_cell& c : report.cells) {
        for (int metric = 0; metric < 2; ++metric) {
            out << family_name(s.family) << ',' << c.n << ',';
            if (!lattice) out << s.constellation;
            out << ',';
            if (!lattice) out << format_scalar(s.snr_db);
            out << ',' << (s.lll ? "lll" : "none") << ',' << c.algo_old << ',' << c.algo_new << ','
                << (metric == 0 ? "flops" : "intops") << ','
                << format_scalar(metric == 0 ? c.flop_gain : c.intop_gain) << ',' << s.matrices
                << ',' << c.vectors << ',' << s.seed << '\n';
        }
    }
}

// Per-basis operation totals backing the report, in the same cell order as
// the gain file, two rows (old then new algorithm) per basis.
inline void write_raw_csv(std::ostream& out, const gain_report& report) {
    out << "matrix_index,algo,flops,intops\n";
    for (const gain_cell& c : report.cells)
        for (std::size_t j = 0; j < c.per_matrix.size(); ++j) {
            const pair_matrix_totals& t = c.per_matrix[j];
            out << j << ',' << c.algo_old << ',' << t.old_flops << ',' << t.old_intops << '\n';
            out << j << ',' << c.algo_new << ',' << t.new_flops << ',' << t.new_intops << '\n';
        }
}

} // namespace sphdec
