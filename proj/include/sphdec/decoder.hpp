#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "sphdec/counting.hpp"
#include "sphdec/errors.hpp"
#include "sphdec/triangular.hpp"

namespace sphdec {

// Nearest integer, with half-integer ties resolved toward +infinity
// (round_nearest(-0.5) == 0). One fixed tie rule keeps all engine variants
// on identical search paths.
inline long long round_nearest(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

// Nearest integer of [lo, hi], same tie rule.
inline long long round_clamped(double x, long long lo, long long hi) {
    if (lo > hi) throw argument_error("round_clamped: empty range");
    const long long v = round_nearest(x);
    return v < lo ? lo : (v > hi ? hi : v);
}

// Two-valued sign with sign(0) == -1.
inline int sign_step(double x) { return x > 0.0 ? 1 : -1; }
inline long long sign_step(long long x) { return x > 0 ? 1 : -1; }

enum class basis_form { g_based, h_based };
enum class update_mode { eager, lazy };

// Selects one of the eight engine variants. Conventional ids:
//
//   1 G eager lattice    5 G lazy lattice
//   2 G eager finite     6 G lazy finite
//   3 H eager lattice    7 H lazy lattice
//   4 H eager finite     8 H lazy finite
//
// Eager variants recompute whole projection rows (H) or coefficient sums
// (G) on every descent; lazy variants cache them column-wise and only
// refresh the part invalidated since the last visit.
struct decoder_config {
    basis_form form = basis_form::h_based;
    update_mode mode = update_mode::eager;
    bool finite = false;
    long long u_min = 0;
    long long u_max = 0;

    static decoder_config from_algorithm(int id, long long u_min = 0, long long u_max = 0) {
        if (id < 1 || id > 8) throw argument_error("algorithm id must be in 1..8");
        decoder_config c;
        c.form = (id == 1 || id == 2 || id == 5 || id == 6) ? basis_form::g_based : basis_form::h_based;
        c.mode = id <= 4 ? update_mode::eager : update_mode::lazy;
        c.finite = (id % 2) == 0;
        if (c.finite) {
            c.u_min = u_min;
            c.u_max = u_max;
        }
        return c;
    }

    int algorithm_id() const {
        int id = form == basis_form::g_based ? 1 : 3;
        if (finite) id += 1;
        if (mode == update_mode::lazy) id += 4;
        return id;
    }

    std::size_t constellation_points() const {
        return finite ? static_cast<std::size_t>(u_max - u_min + 1) : 0;
    }

    void validate() const {
        if (finite && u_min > u_max) throw argument_error("decoder_config: empty finite range");
    }
};

struct decode_result {
    std::vector<long long> coefficients; // arg min of |r - u*G| over the domain
    double squared_distance = 0.0;       // metric of the returned point
    op_counter ops;
};

// One candidate examination: layer index (1-based, 1 = innermost) and the
// integer coefficient tried there. Out-of-range candidates produced by the
// finite variants' double stepping are recorded too.
struct trace_event {
    int layer = 0;
    long long candidate = 0;

    bool operator==(const trace_event&) const = default;
};

// Per-iteration diagnostics for the counting and recursion tests.
struct audit_event {
    int layer = 0;
    long long candidate = 0;
    double projection = 0.0;   // value whose rounding produced the candidate
    double displacement = 0.0; // orthogonal offset to the examined layer
    double dist_tail = 0.0;    // accumulated distance above this layer
    double dist_here = 0.0;    // accumulated distance including this layer
};

struct charge_event {
    step id{};
    std::uint64_t multiplicity = 0;
};

struct audit_data {
    std::vector<audit_event> layers;
    std::vector<charge_event> charges;
};

namespace detail {

struct null_tracer {
    static void candidate(int, long long) {}
    static void layer_metrics(const audit_event&) {}
    static void charge(step, std::uint64_t) {}
};

struct candidate_tracer {
    std::vector<trace_event>* out;
    void candidate(int layer, long long u) const { out->push_back(trace_event{layer, u}); }
    static void layer_metrics(const audit_event&) {}
    static void charge(step, std::uint64_t) {}
};

struct audit_tracer {
    audit_data* out;
    void candidate(int, long long) const {}
    void layer_metrics(const audit_event& e) const { out->layers.push_back(e); }
    void charge(step s, std::uint64_t mult) const { out->charges.push_back(charge_event{s, mult}); }
};

} // namespace detail

// Closest-point search by depth-first layer enumeration inside a shrinking
// sphere, candidates per layer in zig-zag order around the projection
// value. One instance owns the workspace (reused across calls); instances
// are independent and share the basis pair read-only.
class decoder {
public:
    decoder(const decoder_config& cfg, lower_triangular_pair pair)
        : cfg_(cfg), pair_(std::move(pair)), n_(pair_.dimension()) {
        cfg_.validate();
        if (n_ == 0) throw argument_error("decoder: empty basis");
        if (pair_.g.cols() != n_ || pair_.h.rows() != n_ || pair_.h.cols() != n_)
            throw argument_error("decoder: basis pair must be square and consistent");
        if (!is_lower_triangular(pair_.g) || !has_positive_diagonal(pair_.g))
            throw argument_error("decoder: basis must be lower triangular with positive diagonal");
        model_ = cost_table(cfg_.constellation_points());
        u_.assign(n_ + 2, 0);
        zig_.assign(n_ + 2, 0);
        best_u_.assign(n_ + 2, 0);
        dist_.assign(n_ + 2, 0.0);
        disp_.assign(n_ + 2, 0.0);
        proj_val_.assign(n_ + 2, 0.0);
        restart_.assign(n_ + 2, 0);
        table_.assign(n_ * n_, 0.0);
    }

    const decoder_config& config() const { return cfg_; }
    const lower_triangular_pair& basis() const { return pair_; }
    std::size_t dimension() const { return n_; }

    decode_result decode(std::span<const double> r) {
        detail::null_tracer tr;
        return dispatch(r, tr);
    }

    std::pair<decode_result, std::vector<trace_event>> trace_decode(std::span<const double> r) {
        std::vector<trace_event> events;
        detail::candidate_tracer tr{&events};
        decode_result res = dispatch(r, tr);
        return {std::move(res), std::move(events)};
    }

    std::pair<decode_result, audit_data> audit_decode(std::span<const double> r) {
        audit_data data;
        detail::audit_tracer tr{&data};
        decode_result res = dispatch(r, tr);
        return {std::move(res), std::move(data)};
    }

private:
    template <class Tracer>
    decode_result dispatch(std::span<const double> r, Tracer& tr) {
        if (r.size() != n_) throw argument_error("decode: input length differs from dimension");
        for (double x : r)
            if (!std::isfinite(x)) throw argument_error("decode: non-finite input");
        const bool g_form = cfg_.form == basis_form::g_based;
        const bool lazy = cfg_.mode == update_mode::lazy;
        if (g_form) {
            if (lazy)
                return cfg_.finite ? run<basis_form::g_based, update_mode::lazy, true>(r, tr)
                                   : run<basis_form::g_based, update_mode::lazy, false>(r, tr);
            return cfg_.finite ? run<basis_form::g_based, update_mode::eager, true>(r, tr)
                               : run<basis_form::g_based, update_mode::eager, false>(r, tr);
        }
        if (lazy)
            return cfg_.finite ? run<basis_form::h_based, update_mode::lazy, true>(r, tr)
                               : run<basis_form::h_based, update_mode::lazy, false>(r, tr);
        return cfg_.finite ? run<basis_form::h_based, update_mode::eager, true>(r, tr)
                           : run<basis_form::h_based, update_mode::eager, false>(r, tr);
    }

    template <basis_form BF, update_mode UM, bool FIN, class Tracer>
    decode_result run(std::span<const double> rv, Tracer& tr) {
        constexpr bool G_BASED = BF == basis_form::g_based;
        constexpr bool H_BASED = BF == basis_form::h_based;
        constexpr bool LAZY = UM == update_mode::lazy;
        const int n = static_cast<int>(n_);
        const double inf = std::numeric_limits<double>::infinity();
        const long long lo = cfg_.u_min, hi = cfg_.u_max;

        op_counter ops;
        auto chg = [&](step s, std::uint64_t mult = 1) {
            if (mult == 0) return;
            const step_cost& c = model_[static_cast<std::size_t>(s)];
            ops.charge(c.kind, static_cast<std::uint64_t>(c.amount) * mult);
            tr.charge(s, mult);
        };

        // 1-based views; index 0 of every workspace array is unused.
        auto r = [&](int k) { return rv[std::size_t(k - 1)]; };
        long long* u = u_.data();
        long long* zig = zig_.data();
        long long* held = best_u_.data();
        double* dist = dist_.data();
        double* disp = disp_.data();
        double* pval = proj_val_.data();
        int* restart = restart_.data();
        auto g = [&](int i, int j) { return pair_.g(std::size_t(i - 1), std::size_t(j - 1)); };
        auto h = [&](int i, int j) { return pair_.h(std::size_t(i - 1), std::size_t(j - 1)); };
        auto tab = [&](int i, int j) -> double& { return table_[std::size_t(i - 1) * n_ + std::size_t(j - 1)]; };

        auto pick = [&](double x) -> long long {
            if constexpr (FIN) {
                chg(step::round_clamp);
                return round_clamped(x, lo, hi);
            } else {
                chg(step::round_plain);
                return round_nearest(x);
            }
        };

        double best = inf;
        double y = 0.0; // displacement of the most recently examined layer
        int i;

        dist[n + 1] = 0.0;
        if constexpr (H_BASED) {
            // Top projection row: coefficients of r on the basis, r * H.
            for (int j = 1; j <= n; ++j) {
                double s = 0.0;
                for (int k = j; k <= n; ++k) s += r(k) * h(k, j);
                chg(step::proj_init_term, std::uint64_t(n - j + 1));
                tab(n, j) = s;
            }
        }
        if constexpr (LAZY) {
            for (int j = 1; j <= n; ++j) restart[j] = n;
            if constexpr (G_BASED)
                for (int j = 1; j <= n; ++j) tab(n, j) = 0.0;
        }
        if constexpr (H_BASED && !LAZY) {
            // Eager H starts with the top layer already examined.
            i = n;
            u[n] = pick(tab(n, n));
            tr.candidate(n, u[n]);
            y = (tab(n, n) - double(u[n])) / h(n, n);
            chg(step::displacement_from_h);
            zig[n] = sign_step(y);
            chg(step::sign_of_displacement);
            dist[n] = y * y;
            chg(step::dist_init_square);
            tr.layer_metrics(audit_event{n, u[n], tab(n, n), y, 0.0, dist[n]});
        } else {
            i = n + 1;
        }

    LOOP:
        // Descend while the accumulated distance stays inside the sphere.
        do {
            if (i != 1) {
                --i;
                if constexpr (H_BASED && !LAZY) {
                    for (int j = 1; j <= i; ++j) tab(i, j) = tab(i + 1, j) - y * h(i + 1, j);
                    chg(step::proj_row_term, std::uint64_t(i));
                }
                if constexpr (G_BASED && LAZY) {
                    // Refresh the cached coefficient sums of column i from
                    // the first stale layer downward.
                    for (int j = restart[i]; j >= i + 1; --j)
                        tab(j - 1, i) = tab(j, i) + double(u[j]) * g(j, i);
                    chg(step::partial_sum_term, std::uint64_t(restart[i] - i));
                }
                if constexpr (H_BASED && LAZY) {
                    for (int j = restart[i]; j >= i + 1; --j)
                        tab(j - 1, i) = tab(j, i) - disp[j] * h(j, i);
                    chg(step::proj_col_term, std::uint64_t(restart[i] - i));
                }
                double pv;
                if constexpr (G_BASED) {
                    double s;
                    if constexpr (!LAZY) {
                        s = 0.0;
                        for (int j = n; j >= i + 1; --j) s += double(u[j]) * g(j, i);
                        chg(step::coeff_sum_term, std::uint64_t(n - i));
                    } else {
                        s = tab(i, i);
                    }
                    pv = (r(i) - s) / g(i, i);
                    chg(step::projection_divide);
                    pval[i] = pv;
                } else {
                    pv = tab(i, i);
                }
                u[i] = pick(pv);
                tr.candidate(i, u[i]);
                if constexpr (G_BASED) {
                    y = (pv - double(u[i])) * g(i, i);
                    chg(step::displacement_from_g);
                } else {
                    y = (tab(i, i) - double(u[i])) / h(i, i);
                    chg(step::displacement_from_h);
                    if constexpr (LAZY) disp[i] = y;
                }
                zig[i] = sign_step(y);
                chg(step::sign_of_displacement);
                dist[i] = dist[i + 1] + y * y;
                chg(step::dist_accumulate);
                tr.layer_metrics(audit_event{i, u[i], pv, y, dist[i + 1], dist[i]});
            } else {
                for (int j = 1; j <= n; ++j) held[j] = u[j];
                best = dist[1];
            }
            chg(step::down_compare);
        } while (dist[i] < best);
        {
            const int deepest = i;
            // Ascend while no layer offers a candidate inside the sphere.
            do {
                if (i == n) {
                    decode_result res;
                    res.coefficients.assign(held + 1, held + 1 + n);
                    res.squared_distance = best;
                    res.ops = ops;
                    return res;
                } else {
                    ++i;
                    if constexpr (FIN) {
                        // Unreachable until a candidate inside the range is
                        // found; the sentinel propagates into dist below.
                        if constexpr (H_BASED && LAZY)
                            disp[i] = inf;
                        else
                            y = inf;
                    }
                    u[i] += zig[i];
                    chg(step::zigzag_step);
                    tr.candidate(i, u[i]);
                    zig[i] = -zig[i] - sign_step(zig[i]);
                    chg(step::zigzag_reverse);
                    bool usable = true;
                    if constexpr (FIN) {
                        chg(step::range_check);
                        usable = lo <= u[i] && u[i] <= hi;
                    }
                    if (usable) {
                        if constexpr (G_BASED) {
                            y = (pval[i] - double(u[i])) * g(i, i);
                            chg(step::displacement_from_g);
                        } else {
                            y = (tab(i, i) - double(u[i])) / h(i, i);
                            chg(step::displacement_from_h);
                            if constexpr (LAZY) disp[i] = y;
                        }
                    } else if constexpr (FIN) {
                        // Step once more in the zig-zag; a second miss
                        // leaves this layer marked unreachable.
                        u[i] += zig[i];
                        chg(step::zigzag_step);
                        tr.candidate(i, u[i]);
                        zig[i] = -zig[i] - sign_step(zig[i]);
                        chg(step::zigzag_reverse);
                        chg(step::range_check);
                        if (lo <= u[i] && u[i] <= hi) {
                            if constexpr (G_BASED) {
                                y = (pval[i] - double(u[i])) * g(i, i);
                                chg(step::displacement_from_g);
                            } else {
                                y = (tab(i, i) - double(u[i])) / h(i, i);
                                chg(step::displacement_from_h);
                                if constexpr (LAZY) disp[i] = y;
                            }
                        }
                    }
                    const double yy = (H_BASED && LAZY) ? disp[i] : y;
                    dist[i] = std::isinf(yy) ? inf : dist[i + 1] + yy * yy;
                    chg(step::dist_accumulate);
                    tr.layer_metrics(audit_event{i, u[i],
                                                 G_BASED ? pval[i] : tab(i, i),
                                                 yy, dist[i + 1], dist[i]});
                }
                chg(step::up_compare);
            } while (dist[i] >= best);
            if constexpr (LAZY) {
                // Layers deepest..i-1 were left and re-entered, so their
                // cached columns must be refreshed from layer i downward.
                for (int j = deepest; j <= i - 1; ++j) restart[j] = i;
                for (int j = deepest - 1; j >= 1; --j) {
                    chg(step::restart_compare);
                    if (restart[j] < i)
                        restart[j] = i;
                    else
                        goto LOOP;
                }
            }
        }
        goto LOOP;
    }

    decoder_config cfg_;
    lower_triangular_pair pair_;
    std::size_t n_;
    cost_model model_{};
    std::vector<long long> u_, zig_, best_u_;
    std::vector<double> dist_, disp_, proj_val_;
    std::vector<int> restart_;
    std::vector<double> table_; // projection rows (H forms) or cached sums (lazy G)
};

inline decode_result decode(const decoder_config& cfg, const lower_triangular_pair& pair,
                            std::span<const double> r) {
    decoder d(cfg, pair);
    return d.decode(r);
}

inline std::pair<decode_result, std::vector<trace_event>> trace_decode(
    const decoder_config& cfg, const lower_triangular_pair& pair, std::span<const double> r) {
    decoder d(cfg, pair);
    return d.trace_decode(r);
}

} // namespace sphdec
