#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qagg {

enum class IsoOperator { Sort, Pava, MinMaxSweep };

// Result of an isotonization operator: the projected values plus a compact
// descriptor of the almost-everywhere linear map the operator applied, used
// for reverse-mode differentiation when the operator sits inside a loss.
//
//   Sort         -> source[k] = input index whose value landed in slot k
//                   (a permutation; stable on ties)
//   MinMaxSweep  -> source[k] = input index whose value survived at slot k
//                   (not necessarily a permutation; on ties the index closer
//                   to the sweep origin wins, matching the forward pass)
//   Pava         -> blocks of pooled indices [start, end), each output in a
//                   block equals the block mean of the inputs
struct IsotonicResult {
    IsoOperator op;
    std::vector<double> values;
    std::vector<std::size_t> source;                       // Sort, MinMaxSweep
    std::vector<std::pair<std::size_t, std::size_t>> blocks; // Pava

    // Jacobian-vector product: directional derivative of the operator at the
    // recorded point, applied to `dir`.
    std::vector<double> jvp(std::span<const double> dir) const;
    // Vector-Jacobian product: accumulates d(loss)/d(input) given
    // d(loss)/d(output), into grad_in (which must be pre-sized).
    void vjp(std::span<const double> grad_out, std::span<double> grad_in) const;
};

// Ascending stable sort (order statistics).
IsotonicResult sort_op(std::span<const double> v);

// L2 projection onto the nondecreasing cone via pooled adjacent violators.
IsotonicResult pava(std::span<const double> v);

// Outward cumulative max (upward) / cumulative min (downward) from the
// anchor entry. median_index is 0-based and must be < v.size().
IsotonicResult min_max_sweep(std::span<const double> v, std::size_t median_index);

IsotonicResult apply_isotonic(IsoOperator op, std::span<const double> v,
                              std::size_t median_index);

} // namespace qagg
