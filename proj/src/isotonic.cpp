#include "qagg/isotonic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qagg {

std::vector<double> IsotonicResult::jvp(std::span<const double> dir) const {
    std::vector<double> out(values.size(), 0.0);
    if (op == IsoOperator::Pava) {
        for (const auto& [b, e] : blocks) {
            double s = 0.0;
            for (std::size_t i = b; i < e; ++i) s += dir[i];
            s /= static_cast<double>(e - b);
            for (std::size_t i = b; i < e; ++i) out[i] = s;
        }
    } else {
        for (std::size_t k = 0; k < values.size(); ++k) out[k] = dir[source[k]];
    }
    return out;
}

void IsotonicResult::vjp(std::span<const double> grad_out, std::span<double> grad_in) const {
    if (op == IsoOperator::Pava) {
        for (const auto& [b, e] : blocks) {
            double s = 0.0;
            for (std::size_t i = b; i < e; ++i) s += grad_out[i];
            s /= static_cast<double>(e - b);
            for (std::size_t i = b; i < e; ++i) grad_in[i] += s;
        }
    } else {
        for (std::size_t k = 0; k < values.size(); ++k) grad_in[source[k]] += grad_out[k];
    }
}

IsotonicResult sort_op(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("sort_op: empty input");
    IsotonicResult r;
    r.op = IsoOperator::Sort;
    r.source.resize(v.size());
    std::iota(r.source.begin(), r.source.end(), std::size_t{0});
    std::stable_sort(r.source.begin(), r.source.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    r.values.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) r.values[k] = v[r.source[k]];
    return r;
}

IsotonicResult pava(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("pava: empty input");
    const std::size_t m = v.size();
    // Stack of merged blocks: (start index, count, mean).
    std::vector<std::size_t> start;
    std::vector<std::size_t> count;
    std::vector<double> block_mean;
    start.reserve(m);
    count.reserve(m);
    block_mean.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        start.push_back(i);
        count.push_back(1);
        block_mean.push_back(v[i]);
        while (block_mean.size() > 1 && block_mean[block_mean.size() - 2] > block_mean.back()) {
            const double n1 = static_cast<double>(count[count.size() - 2]);
            const double n2 = static_cast<double>(count.back());
            const double merged = (n1 * block_mean[block_mean.size() - 2] + n2 * block_mean.back()) / (n1 + n2);
            count[count.size() - 2] += count.back();
            block_mean[block_mean.size() - 2] = merged;
            start.pop_back();
            count.pop_back();
            block_mean.pop_back();
        }
    }
    IsotonicResult r;
    r.op = IsoOperator::Pava;
    r.values.resize(m);
    for (std::size_t b = 0; b < start.size(); ++b) {
        const std::size_t e = start[b] + count[b];
        r.blocks.emplace_back(start[b], e);
        for (std::size_t i = start[b]; i < e; ++i) r.values[i] = block_mean[b];
    }
    return r;
}

IsotonicResult min_max_sweep(std::span<const double> v, std::size_t median_index) {
    if (v.empty()) throw std::invalid_argument("min_max_sweep: empty input");
    if (median_index >= v.size()) throw std::invalid_argument("min_max_sweep: anchor out of range");
    IsotonicResult r;
    r.op = IsoOperator::MinMaxSweep;
    r.values.assign(v.begin(), v.end());
    r.source.resize(v.size());
    r.source[median_index] = median_index;
    // Ties keep the already-swept index (the one nearer the anchor).
    for (std::size_t k = median_index + 1; k < v.size(); ++k) {
        if (v[k] > r.values[k - 1]) {
            r.values[k] = v[k];
            r.source[k] = k;
        } else {
            r.values[k] = r.values[k - 1];
            r.source[k] = r.source[k - 1];
        }
    }
    for (std::size_t k = median_index; k-- > 0;) {
        if (v[k] < r.values[k + 1]) {
            r.values[k] = v[k];
            r.source[k] = k;
        } else {
            r.values[k] = r.values[k + 1];
            r.source[k] = r.source[k + 1];
        }
    }
    return r;
}

IsotonicResult apply_isotonic(IsoOperator op, std::span<const double> v,
                              std::size_t median_index) {
    switch (op) {
        case IsoOperator::Sort: return sort_op(v);
        case IsoOperator::Pava: return pava(v);
        case IsoOperator::MinMaxSweep: return min_max_sweep(v, median_index);
    }
    throw std::invalid_argument("apply_isotonic: unknown operator");
}

} // namespace qagg
