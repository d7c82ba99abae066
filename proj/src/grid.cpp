#include "qagg/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qagg {

namespace {
constexpr double kLevelTol = 1e-12;
}

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("QuantileGrid: empty level set");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (!(levels_[i] > 0.0 && levels_[i] < 1.0)) {
            throw std::invalid_argument("QuantileGrid: levels must lie in (0,1)");
        }
        if (i > 0 && !(levels_[i] > levels_[i - 1])) {
            throw std::invalid_argument("QuantileGrid: levels must be strictly increasing");
        }
    }
    // Symmetry: the i-th smallest must mirror the i-th largest.
    const std::size_t m = levels_.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (std::fabs(levels_[i] + levels_[m - 1 - i] - 1.0) > kLevelTol) {
            throw std::invalid_argument("QuantileGrid: level set must be symmetric around 0.5");
        }
    }
    has_median_ = (m % 2 == 1);
    if (has_median_) {
        median_index_ = m / 2;
        if (std::fabs(levels_[median_index_] - 0.5) > kLevelTol) {
            throw std::invalid_argument("QuantileGrid: symmetric odd grid must contain 0.5");
        }
    }
    for (double tau : levels_) {
        if (tau < 0.5 - kLevelTol) alphas_.push_back(2.0 * tau);
    }
}

QuantileGrid QuantileGrid::even(int m) {
    if (m < 1) throw std::invalid_argument("QuantileGrid::even: m must be positive");
    std::vector<double> lv(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) lv[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / (m + 1);
    return QuantileGrid(std::move(lv));
}

std::size_t QuantileGrid::median_anchor() const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i] >= 0.5 - kLevelTol) return i;
    }
    return levels_.size() - 1;
}

bool QuantileGrid::evenly_spaced(double rel_tol) const {
    if (levels_.size() < 2) return true;
    const double h = levels_[1] - levels_[0];
    for (std::size_t i = 2; i < levels_.size(); ++i) {
        if (std::fabs((levels_[i] - levels_[i - 1]) - h) > rel_tol * h) return false;
    }
    return true;
}

std::size_t QuantileGrid::index_of(double tau) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (std::fabs(levels_[i] - tau) <= kLevelTol) return i;
    }
    throw std::invalid_argument("QuantileGrid: level not present in grid");
}

} // namespace qagg
