#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qagg {

// A symmetric set of quantile levels together with its central-interval
// reparametrization. Levels must be strictly increasing, inside (0,1), and
// mirror-symmetric (tau present iff 1-tau present); the constructor rejects
// anything else.
class QuantileGrid {
public:
    QuantileGrid() = default;
    explicit QuantileGrid(std::vector<double> levels);

    // Evenly spaced symmetric grid {1/(m+1), ..., m/(m+1)}.
    static QuantileGrid even(int m);

    const std::vector<double>& levels() const { return levels_; }
    // Exclusion probabilities {2*tau : tau in levels, tau < 0.5}; the median,
    // when present, pairs with itself and is not listed here.
    const std::vector<double>& alphas() const { return alphas_; }

    std::size_t size() const { return levels_.size(); }
    bool has_median() const { return has_median_; }
    // Valid only when has_median() is true.
    std::size_t median_index() const { return median_index_; }
    // Index of the smallest level >= 0.5; anchor for the min-max sweep and
    // margin pilots on grids without an exact median.
    std::size_t median_anchor() const;

    bool evenly_spaced(double rel_tol = 1e-9) const;

    // Index of the level equal to `tau` (within 1e-12); throws if absent.
    std::size_t index_of(double tau) const;

    bool operator==(const QuantileGrid& other) const { return levels_ == other.levels_; }

private:
    std::vector<double> levels_;
    std::vector<double> alphas_;
    bool has_median_ = false;
    std::size_t median_index_ = 0;
};

// One prediction: the m per-level quantile values aligned with a grid.
// Monotonicity across levels is NOT implied unless the vector came out of an
// isotonization operator.
struct QuantileVector {
    QuantileGrid grid;
    std::vector<double> values;
};

} // namespace qagg
