#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qagg::dist {

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
    double quantile(double u) const;
    double cdf(double v) const;
    double pdf(double v) const;
    double log_pdf(double v) const;
};

// Shared evaluation grid in (0,1): `points` even samples clipped to
// [eps, 1-eps]. The defaults keep every check in this module below 1e-3
// error in double precision.
struct UGrid {
    std::vector<double> u;
    static UGrid standard(std::size_t points = 10000, double eps = 1e-4);
};

// A distribution carried numerically: its quantile function sampled on a
// u-grid, plus CDF and density samples on a value grid (density by finite
// differencing). An analytic CDF closure is kept when the construction
// allows it, so downstream averages stay machine accurate.
struct NumericDistribution {
    std::vector<double> u;        // shared grid in (0,1)
    std::vector<double> quantile; // Q(u_i), nondecreasing
    std::vector<double> values;   // value grid
    std::vector<double> cdf;      // F on the value grid
    std::vector<double> pdf;      // f on the value grid
    std::function<double(double)> cdf_fn; // optional analytic CDF

    double quantile_at(double u) const;  // interpolate Q
    double cdf_at(double v) const;       // analytic if available, else interpolate
};

NumericDistribution sample_gaussian(const Gaussian& g, const UGrid& grid);

// Build a distribution directly from quantile samples on the grid.
// The samples must be nondecreasing.
NumericDistribution from_quantile_samples(const UGrid& grid, std::vector<double> q);

// Pointwise CDF mixture F = sum_j w_j F_j. Weights must be nonnegative and
// sum to one within 1e-12.
NumericDistribution probability_average(std::span<const NumericDistribution> dists,
                                        std::span<const double> weights);

// Pointwise quantile-function average Qbar = sum_j w_j Q_j; the CDF is its
// numerical inverse.
NumericDistribution quantile_average(std::span<const NumericDistribution> dists,
                                     std::span<const double> weights);

// k-th uncentered moment via the quantile-integral representation,
// trapezoid rule on the u-grid.
double moment(const NumericDistribution& d, int k);

// One row of the tail diagnostic: densities of the probability average (f)
// and the quantile average (fbar) at v, both relative to f1(v).
struct TailRatioRow {
    double v;
    double prob_avg_ratio;  // f(v) / f1(v)
    double quant_avg_ratio; // fbar(v) / f1(v)
};
struct TailRatioTable {
    std::vector<TailRatioRow> rows;
    std::size_t underflow_skipped = 0; // rows dropped for unrepresentable ratios
};

// Evaluated analytically for a Gaussian pair (the quantile-average density
// comes from the harmonic-mean identity, computed in log space so the far
// tail stays representable).
TailRatioTable tail_ratio_profile(const Gaussian& d1, const Gaussian& d2,
                                  std::array<double, 2> weights,
                                  std::span<const double> v_grid);

} // namespace qagg::dist
