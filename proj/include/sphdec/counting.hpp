#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace sphdec {

enum class op_kind { flop, intop };

// Tallies of counted arithmetic during one decode. Addition, subtraction,
// multiplication, division and comparison all count; operations on real
// scalars are flops, operations on integer scalars are intops. Loop
// counters on the layer index, plain assignments and memory traffic are
// free.
struct op_counter {
    std::uint64_t flops = 0;
    std::uint64_t intops = 0;

    void charge(op_kind kind, std::uint64_t amount) {
        if (kind == op_kind::flop)
            flops += amount;
        else
            intops += amount;
    }

    void reset() { flops = 0; intops = 0; }

    bool operator==(const op_counter&) const = default;
};

// Every counted line of the decoding engine, at the granularity of one
// table entry or one executed statement. Keeping the classification in one
// table makes the judgment calls auditable and revisable in a single place.
enum class step : unsigned {
    proj_init_term,     // one r_k * H(k,j) term of the top projection row
    proj_row_term,      // one entry of a row-wise projection update (eager H)
    proj_col_term,      // one entry of a column-wise projection update (lazy H)
    partial_sum_term,   // one entry of a cached coefficient-sum update (lazy G)
    coeff_sum_term,     // one u_j * G(j,i) term accumulated from scratch (eager G)
    projection_divide,  // (r_i - s) / G(i,i)
    round_plain,        // round to nearest integer
    round_clamp,        // round to nearest integer of the finite range
    displacement_from_h,// (E_ii - u_i) / H(i,i)
    displacement_from_g,// (p_i - u_i) * G(i,i)
    sign_of_displacement,
    dist_init_square,   // top-layer distance set to y^2 directly
    dist_accumulate,    // dist_i = dist_{i+1} + y^2
    down_compare,       // while (dist_i < best)
    up_compare,         // while (dist_i >= best)
    zigzag_step,        // u_i = u_i + step_i
    zigzag_reverse,     // step_i = -step_i - sign(step_i)
    range_check,        // u_min <= u_i <= u_max
    restart_compare,    // restart_j < i bookkeeping test (lazy forms)
    count_
};

constexpr std::size_t step_count = static_cast<std::size_t>(step::count_);

struct step_cost {
    op_kind kind;
    std::uint32_t amount;
};

using cost_model = std::array<step_cost, step_count>;

// Clamped rounding over an L-point range costs ceil(log2 L) flops: one
// comparison for a 2-point range, two for a 4-point range, and the binary
// search depth in general.
constexpr std::uint32_t clamped_round_cost(std::size_t points) {
    std::uint32_t c = 0;
    std::size_t reach = 1;
    while (reach < points) {
        reach <<= 1;
        ++c;
    }
    return c;
}

// The per-unit cost of every counted micro-step. Multi-term sums are
// charged per term as multiply plus accumulate, identically for the
// from-scratch and the cached route, so that the two routes are charged
// the same for the same number of terms.
constexpr cost_model cost_table(std::size_t constellation_points = 0) {
    cost_model t{};
    auto set = [&t](step s, op_kind k, std::uint32_t a) {
        t[static_cast<std::size_t>(s)] = step_cost{k, a};
    };
    set(step::proj_init_term, op_kind::flop, 2);
    set(step::proj_row_term, op_kind::flop, 2);
    set(step::proj_col_term, op_kind::flop, 2);
    set(step::partial_sum_term, op_kind::flop, 2);
    set(step::coeff_sum_term, op_kind::flop, 2);
    set(step::projection_divide, op_kind::flop, 2);
    set(step::round_plain, op_kind::flop, 1);
    set(step::round_clamp, op_kind::flop, clamped_round_cost(constellation_points));
    set(step::displacement_from_h, op_kind::flop, 2);
    set(step::displacement_from_g, op_kind::flop, 2);
    set(step::sign_of_displacement, op_kind::flop, 1);
    set(step::dist_init_square, op_kind::flop, 1);
    set(step::dist_accumulate, op_kind::flop, 2);
    set(step::down_compare, op_kind::flop, 1);
    set(step::up_compare, op_kind::flop, 1);
    set(step::zigzag_step, op_kind::intop, 1);
    set(step::zigzag_reverse, op_kind::intop, 3); // negate, sign test, subtract
    set(step::range_check, op_kind::intop, 2);    // two bound comparisons
    set(step::restart_compare, op_kind::intop, 1);
    return t;
}

constexpr const char* step_name(step s) {
    switch (s) {
        case step::proj_init_term: return "proj_init_term";
        case step::proj_row_term: return "proj_row_term";
        case step::proj_col_term: return "proj_col_term";
        case step::partial_sum_term: return "partial_sum_term";
        case step::coeff_sum_term: return "coeff_sum_term";
        case step::projection_divide: return "projection_divide";
        case step::round_plain: return "round_plain";
        case step::round_clamp: return "round_clamp";
        case step::displacement_from_h: return "displacement_from_h";
        case step::displacement_from_g: return "displacement_from_g";
        case step::sign_of_displacement: return "sign_of_displacement";
        case step::dist_init_square: return "dist_init_square";
        case step::dist_accumulate: return "dist_accumulate";
        case step::down_compare: return "down_compare";
        case step::up_compare: return "up_compare";
        case step::zigzag_step: return "zigzag_step";
        case step::zigzag_reverse: return "zigzag_reverse";
        case step::range_check: return "range_check";
        case step::restart_compare: return "restart_compare";
        case step::count_: break;
    }
    return "?";
}

} // namespace sphdec
