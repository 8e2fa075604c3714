#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sphdec/errors.hpp"
#include "sphdec/lll.hpp"
#include "sphdec/matrix.hpp"
#include "sphdec/triangular.hpp"

namespace sphdec {

// Reference answer from exhaustive search. margin is the squared-distance
// gap to the runner-up; a zero margin means the minimizer is not unique
// (or, for the lattice oracle, could not be certified unique).
struct oracle_result {
    std::vector<long long> best;
    double best_sq_dist = 0.0;
    double margin = 0.0;
};

namespace detail {

// Exhaustive sweep over a coordinate box, evaluating |r - u*g|^2 at every
// grid point. Works for any square basis: partial point coordinates are
// carried down the recursion and the metric is evaluated at the leaves.
// Enumeration is high-to-low per coordinate, so on exact metric ties the
// point with the larger coefficient at the outermost differing layer is
// kept, matching the engine's round-half-up tie rule.
class box_sweep {
public:
    box_sweep(const matrix& g, std::span<const double> r,
              std::span<const long long> lo, std::span<const long long> hi)
        : g_(g), r_(r), lo_(lo), hi_(hi), n_(g.rows()),
          acc_(n_ + 1, std::vector<double>(n_, 0.0)), pick_(n_, 0) {}

    oracle_result run() {
        best_sq_ = std::numeric_limits<double>::infinity();
        second_sq_ = std::numeric_limits<double>::infinity();
        descend(static_cast<int>(n_));
        oracle_result res;
        res.best = best_;
        res.best_sq_dist = best_sq_;
        res.margin = std::isinf(second_sq_) ? second_sq_ : second_sq_ - best_sq_;
        return res;
    }

private:
    void descend(int layer) {
        if (layer == 0) {
            const std::vector<double>& x = acc_[0];
            double total = 0.0;
            for (std::size_t k = 0; k < n_; ++k) {
                const double d = r_[k] - x[k];
                total += d * d;
            }
            if (total < best_sq_) {
                second_sq_ = best_sq_;
                best_sq_ = total;
                best_ = pick_;
            } else if (total < second_sq_) {
                second_sq_ = total;
            }
            return;
        }
        const std::size_t i = static_cast<std::size_t>(layer) - 1;
        const std::vector<double>& parent = acc_[layer];
        std::vector<double>& mine = acc_[layer - 1];
        for (long long c = hi_[i]; c >= lo_[i]; --c) {
            for (std::size_t k = 0; k < n_; ++k) mine[k] = parent[k] + double(c) * g_(i, k);
            pick_[i] = c;
            descend(layer - 1);
        }
    }

    const matrix& g_;
    std::span<const double> r_;
    std::span<const long long> lo_;
    std::span<const long long> hi_;
    std::size_t n_;
    std::vector<std::vector<double>> acc_;
    std::vector<long long> pick_;
    std::vector<long long> best_;
    double best_sq_ = 0.0;
    double second_sq_ = 0.0;
};

inline double box_volume(std::span<const long long> lo, std::span<const long long> hi) {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= double(hi[i] - lo[i] + 1);
    return v;
}

} // namespace detail

// |r - u*g|^2 evaluated directly.
inline double point_sq_dist(const matrix& g, std::span<const double> r,
                            std::span<const long long> u) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.cols(); ++k) {
        double x = 0.0;
        for (std::size_t j = 0; j < g.rows(); ++j) x += double(u[j]) * g(j, k);
        const double d = r[k] - x;
        total += d * d;
    }
    return total;
}

// Componentwise rounding of r * h.
inline std::vector<long long> babai_round(const matrix& h, std::span<const double> r) {
    const std::size_t n = h.rows();
    std::vector<long long> u(n);
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t k = 0; k < n; ++k) c += r[k] * h(k, j);
        u[j] = static_cast<long long>(std::floor(c + 0.5));
    }
    return u;
}

// Nearest-plane rounding for a lower-triangular basis: peel coordinates
// from the top layer down, subtracting each chosen row.
inline std::vector<long long> babai_nearest_plane(const matrix& g, std::span<const double> r) {
    const std::size_t n = g.rows();
    std::vector<double> res(r.begin(), r.end());
    std::vector<long long> u(n);
    for (std::size_t ii = n; ii-- > 0;) {
        const long long c = static_cast<long long>(std::floor(res[ii] / g(ii, ii) + 0.5));
        u[ii] = c;
        for (std::size_t k = 0; k <= ii; ++k) res[k] -= double(c) * g(ii, k);
    }
    return u;
}

// Exact minimizer of |r - u*g| over the full grid [u_min, u_max]^n by
// direct metric evaluation. Guarded to at most 1e8 grid points.
inline oracle_result oracle_finite(const matrix& g, std::span<const double> r,
                                   long long u_min, long long u_max) {
    const std::size_t n = g.rows();
    if (n == 0 || g.cols() != n) throw argument_error("oracle_finite: square basis required");
    if (r.size() != n) throw argument_error("oracle_finite: input length mismatch");
    if (u_min > u_max) throw argument_error("oracle_finite: empty range");
    std::vector<long long> lo(n, u_min), hi(n, u_max);
    if (detail::box_volume(lo, hi) > 1e8) throw size_error("oracle_finite: grid too large");
    return detail::box_sweep(g, r, lo, hi).run();
}

namespace detail {

inline oracle_result oracle_lattice_impl(const matrix& g, const matrix& h,
                                         std::span<const double> r, bool may_reduce);

// Solve in a reduced basis of the same lattice and map the coefficients
// back through the unimodular transform.
inline oracle_result oracle_lattice_reduced(const matrix& g, const matrix& h,
                                            std::span<const double> r) {
    const std::size_t n = g.rows();
    reduced_basis red = lll_reduce(g, 0.99);
    // g_red = U * g  =>  inverse(g_red) = h * inverse(U).
    matrix uinv_f(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) uinv_f(i, j) = double(red.unimodular_inv[i][j]);
    const matrix h_red = matmul(h, uinv_f);
    oracle_result res = oracle_lattice_impl(red.g_reduced, h_red, r, false);
    std::vector<long long> mapped(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) mapped[j] += res.best[i] * red.unimodular[i][j];
    res.best = std::move(mapped);
    return res;
}

inline oracle_result oracle_lattice_impl(const matrix& g, const matrix& h,
                                         std::span<const double> r, bool may_reduce) {
    const std::size_t n = g.rows();

    // Starting point: the cheaper of rounding and (when triangular)
    // nearest-plane, both valid lattice points, so c0 bounds the optimum.
    std::vector<long long> start = babai_round(h, r);
    double c0 = point_sq_dist(g, r, start);
    if (is_lower_triangular(g)) {
        std::vector<long long> np = babai_nearest_plane(g, r);
        const double d = point_sq_dist(g, r, np);
        if (d < c0) c0 = d;
    }

    // Any u with |r - u*g|^2 <= c_box satisfies, writing x = u*g and
    // e_j = column j of h,
    //   |u_j - (r h)_j| = |((x - r) h)_j| = |(x - r) . e_j| <= |x - r| |e_j|
    // by Cauchy-Schwarz, so the integer box below provably contains every
    // such point. c_box exceeds c0 by a slack so that points outside the
    // box are also strictly worse than the best by at least that slack,
    // which makes the reported margin a true lower bound.
    const double slack = 1e-3 * (1.0 + c0);
    const double c_box = c0 + slack;
    const double rad = std::sqrt(c_box);
    std::vector<long long> lo(n), hi(n);
    std::vector<double> center(n);
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0, nrm2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            c += r[k] * h(k, j);
            nrm2 += h(k, j) * h(k, j);
        }
        center[j] = c;
        const double w = rad * std::sqrt(nrm2) + 1e-9;
        lo[j] = static_cast<long long>(std::ceil(c - w));
        hi[j] = static_cast<long long>(std::floor(c + w));
        if (start[j] < lo[j]) lo[j] = start[j];
        if (start[j] > hi[j]) hi[j] = start[j];
    }

    if (detail::box_volume(lo, hi) > 1e8) {
        if (may_reduce) return oracle_lattice_reduced(g, h, r);
        throw size_error("oracle_lattice: search box too large");
    }

    oracle_result res = detail::box_sweep(g, r, lo, hi).run();
    // Points outside the box have squared distance above c_box.
    const double outside_gap = c_box - res.best_sq_dist;
    if (outside_gap < res.margin) res.margin = outside_gap < 0.0 ? 0.0 : outside_gap;
    return res;
}

} // namespace detail

// Exact minimizer of |r - u*g| over all integer coefficient vectors, by
// sweeping an integer box that provably contains the optimum. Falls back
// to a reduced basis of the same lattice when the box in the given basis
// is too skewed, and fails with size_error beyond 1e8 candidates.
inline oracle_result oracle_lattice(const matrix& g, const matrix& h,
                                    std::span<const double> r) {
    const std::size_t n = g.rows();
    if (n == 0 || g.cols() != n) throw argument_error("oracle_lattice: square basis required");
    if (h.rows() != n || h.cols() != n) throw argument_error("oracle_lattice: inverse shape mismatch");
    if (r.size() != n) throw argument_error("oracle_lattice: input length mismatch");
    return detail::oracle_lattice_impl(g, h, r, true);
}

} // namespace sphdec
