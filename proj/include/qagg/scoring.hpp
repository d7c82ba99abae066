#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qagg/grid.hpp"

namespace qagg {

// Pinball (tilted-L1) loss of quantile estimate q at level tau against
// observation y. Throws std::domain_error for tau outside (0,1).
double pinball(double tau, double y, double q);

// Sum of per-level pinball losses; the training loss, and half the WIS.
double pinball_sum(const QuantileGrid& grid, double y, std::span<const double> q);
double pinball_sum(const QuantileVector& q, double y);

// Canonical weighted interval score: twice the pinball sum. Valid on any grid.
double wis_canonical(const QuantileGrid& grid, std::span<const double> q, double y);

// Interval-form WIS: sum over exclusion probabilities of sharpness plus
// coverage penalty. Only defined for grids without the 0.5 level (the median
// term would be double counted otherwise); use wis_canonical elsewhere.
double wis(const QuantileGrid& grid, std::span<const double> q, double y);

// Discretized CRPS: (2/m) * pinball_sum, a Riemann approximation of the
// integrated pinball loss. Requires an evenly spaced grid.
double crps_discrete(const QuantileGrid& grid, std::span<const double> q, double y);

// Proportion of variance explained by median predictions.
double pve(std::span<const double> median_preds, std::span<const double> y_test);

// Empirical coverage and mean length of the central (1-alpha) interval.
// alpha must belong to the grid's exclusion set.
std::pair<double, double> coverage_and_length(const QuantileGrid& grid,
                                              const std::vector<QuantileVector>& preds,
                                              std::span<const double> y, double alpha);

} // namespace qagg
