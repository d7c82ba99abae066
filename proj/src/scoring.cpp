#include "qagg/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qagg {

double pinball(double tau, double y, double q) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("pinball: tau must lie in (0,1)");
    const double r = y - q;
    return r >= 0.0 ? tau * r : (tau - 1.0) * r;
}

double pinball_sum(const QuantileGrid& grid, double y, std::span<const double> q) {
    if (q.size() != grid.size()) throw std::invalid_argument("pinball_sum: grid/value size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += pinball(grid.levels()[i], y, q[i]);
    return s;
}

double pinball_sum(const QuantileVector& q, double y) {
    return pinball_sum(q.grid, y, q.values);
}

double wis_canonical(const QuantileGrid& grid, std::span<const double> q, double y) {
    return 2.0 * pinball_sum(grid, y, q);
}

double wis(const QuantileGrid& grid, std::span<const double> q, double y) {
    if (grid.has_median()) {
        throw std::invalid_argument("wis: interval form requires a grid without the 0.5 level");
    }
    if (q.size() != grid.size()) throw std::invalid_argument("wis: grid/value size mismatch");
    const std::size_t m = grid.size();
    double s = 0.0;
    for (std::size_t i = 0; i < m / 2; ++i) {
        const double alpha = 2.0 * grid.levels()[i];
        const double lo = q[i];
        const double hi = q[m - 1 - i];
        // Distance from y to [lo, hi]; written so it stays the algebraic
        // counterpart of the pinball pair even when the interval is crossed.
        const double dist = std::max(lo - y, 0.0) + std::max(y - hi, 0.0);
        s += alpha * (hi - lo) + 2.0 * dist;
    }
    return s;
}

double crps_discrete(const QuantileGrid& grid, std::span<const double> q, double y) {
    if (!grid.evenly_spaced()) {
        throw std::invalid_argument("crps_discrete: grid must be evenly spaced");
    }
    return (2.0 / static_cast<double>(grid.size())) * pinball_sum(grid, y, q);
}

double pve(std::span<const double> median_preds, std::span<const double> y_test) {
    if (median_preds.size() != y_test.size()) throw std::invalid_argument("pve: size mismatch");
    if (y_test.size() < 2) throw std::invalid_argument("pve: need at least two samples");
    double ybar = 0.0;
    for (double v : y_test) ybar += v;
    ybar /= static_cast<double>(y_test.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y_test.size(); ++i) {
        ss_res += (y_test[i] - median_preds[i]) * (y_test[i] - median_preds[i]);
        ss_tot += (y_test[i] - ybar) * (y_test[i] - ybar);
    }
    if (ss_tot == 0.0) throw std::domain_error("pve: y_test is constant");
    return 1.0 - ss_res / ss_tot;
}

std::pair<double, double> coverage_and_length(const QuantileGrid& grid,
                                              const std::vector<QuantileVector>& preds,
                                              std::span<const double> y, double alpha) {
    const std::size_t lo_idx = grid.index_of(alpha / 2.0);
    const std::size_t hi_idx = grid.index_of(1.0 - alpha / 2.0);
    if (preds.size() != y.size() || preds.empty()) {
        throw std::invalid_argument("coverage_and_length: size mismatch or empty input");
    }
    double covered = 0.0, length = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double lo = preds[i].values[lo_idx];
        const double hi = preds[i].values[hi_idx];
        if (y[i] >= lo && y[i] <= hi) covered += 1.0;
        length += hi - lo;
    }
    const auto n = static_cast<double>(preds.size());
    return {covered / n, length / n};
}

} // namespace qagg
