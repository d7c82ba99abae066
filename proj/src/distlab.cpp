#include "qagg/distlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qagg/stats.hpp"

namespace qagg::dist {

namespace {

constexpr std::size_t kValueGridPoints = 8001;

void check_simplex(std::span<const double> w, std::size_t n) {
    if (w.size() != n) throw std::invalid_argument("distribution average: weight count mismatch");
    double s = 0.0;
    for (double x : w) {
        if (x < 0.0) throw std::invalid_argument("distribution average: negative weight");
        s += x;
    }
    if (std::fabs(s - 1.0) > 1e-12) {
        throw std::invalid_argument("distribution average: weights must sum to 1");
    }
}

// Linear interpolation of y(x) at xq; x strictly increasing. Clamps outside.
double interp(std::span<const double> x, std::span<const double> y, double xq) {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double t = (xq - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + t * (y[hi] - y[lo]);
}

std::vector<double> even_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

// Centered-difference derivative samples on a (possibly uneven) grid.
std::vector<double> centered_diff(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t b = (i == n - 1) ? n - 1 : i + 1;
        d[i] = (y[b] - y[a]) / (x[b] - x[a]);
    }
    return d;
}

void fill_value_grid(NumericDistribution& d) {
    const double qlo = d.quantile.front();
    const double qhi = d.quantile.back();
    const double pad = 0.05 * std::max(qhi - qlo, 1e-12);
    d.values = even_grid(qlo - pad, qhi + pad, kValueGridPoints);
    d.cdf.resize(d.values.size());
    if (d.cdf_fn) {
        for (std::size_t i = 0; i < d.values.size(); ++i) d.cdf[i] = d.cdf_fn(d.values[i]);
    } else {
        // Numerical inverse of the sampled quantile function.
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            const double v = d.values[i];
            if (v <= qlo) d.cdf[i] = d.u.front();
            else if (v >= qhi) d.cdf[i] = d.u.back();
            else d.cdf[i] = interp(d.quantile, d.u, v);
        }
    }
    d.pdf = centered_diff(d.values, d.cdf);
}

double invert_cdf(const std::function<double(double)>& cdf, double target,
                  double lo, double hi) {
    while (cdf(lo) > target) lo -= std::max(1.0, hi - lo);
    while (cdf(hi) < target) hi += std::max(1.0, hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double Gaussian::quantile(double u) const { return mean + sd * norm_quantile(u); }
double Gaussian::cdf(double v) const { return norm_cdf((v - mean) / sd); }
double Gaussian::pdf(double v) const { return norm_pdf((v - mean) / sd) / sd; }
double Gaussian::log_pdf(double v) const { return norm_log_pdf((v - mean) / sd) - std::log(sd); }

UGrid UGrid::standard(std::size_t points, double eps) {
    UGrid g;
    g.u = even_grid(eps, 1.0 - eps, points);
    return g;
}

double NumericDistribution::quantile_at(double uq) const { return interp(u, quantile, uq); }

double NumericDistribution::cdf_at(double v) const {
    if (cdf_fn) return cdf_fn(v);
    return interp(values, cdf, v);
}

NumericDistribution sample_gaussian(const Gaussian& g, const UGrid& grid) {
    NumericDistribution d;
    d.u = grid.u;
    d.quantile.resize(d.u.size());
    for (std::size_t i = 0; i < d.u.size(); ++i) d.quantile[i] = g.quantile(d.u[i]);
    d.cdf_fn = [g](double v) { return g.cdf(v); };
    fill_value_grid(d);
    return d;
}

NumericDistribution from_quantile_samples(const UGrid& grid, std::vector<double> q) {
    if (q.size() != grid.u.size()) {
        throw std::invalid_argument("from_quantile_samples: size mismatch with u-grid");
    }
    if (!std::is_sorted(q.begin(), q.end())) {
        throw std::invalid_argument("from_quantile_samples: quantile samples must be nondecreasing");
    }
    NumericDistribution d;
    d.u = grid.u;
    d.quantile = std::move(q);
    fill_value_grid(d);
    return d;
}

NumericDistribution probability_average(std::span<const NumericDistribution> dists,
                                        std::span<const double> weights) {
    if (dists.empty()) throw std::invalid_argument("probability_average: no distributions");
    check_simplex(weights, dists.size());
    for (const auto& d : dists) {
        if (d.u.size() != dists[0].u.size()) {
            throw std::invalid_argument("probability_average: mismatched u-grids");
        }
    }
    NumericDistribution out;
    out.u = dists[0].u;

    bool analytic = true;
    for (const auto& d : dists) analytic = analytic && static_cast<bool>(d.cdf_fn);
    if (analytic) {
        std::vector<std::function<double(double)>> fns;
        std::vector<double> w(weights.begin(), weights.end());
        for (const auto& d : dists) fns.push_back(d.cdf_fn);
        out.cdf_fn = [fns, w](double v) {
            double s = 0.0;
            for (std::size_t j = 0; j < fns.size(); ++j) s += w[j] * fns[j](v);
            return s;
        };
    }

    auto mixture_cdf = [&](double v) {
        if (out.cdf_fn) return out.cdf_fn(v);
        double s = 0.0;
        for (std::size_t j = 0; j < dists.size(); ++j) s += weights[j] * dists[j].cdf_at(v);
        return s;
    };

    double lo = dists[0].quantile.front(), hi = dists[0].quantile.back();
    for (const auto& d : dists) {
        lo = std::min(lo, d.quantile.front());
        hi = std::max(hi, d.quantile.back());
    }
    out.quantile.resize(out.u.size());
    double prev = lo - 1.0;
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        const double q = invert_cdf(mixture_cdf, out.u[i], lo - 1.0, hi + 1.0);
        out.quantile[i] = std::max(q, prev); // guard monotonicity against roundoff
        prev = out.quantile[i];
    }
    fill_value_grid(out);
    return out;
}

NumericDistribution quantile_average(std::span<const NumericDistribution> dists,
                                     std::span<const double> weights) {
    if (dists.empty()) throw std::invalid_argument("quantile_average: no distributions");
    check_simplex(weights, dists.size());
    for (const auto& d : dists) {
        if (d.u != dists[0].u) throw std::invalid_argument("quantile_average: mismatched u-grids");
    }
    NumericDistribution out;
    out.u = dists[0].u;
    out.quantile.assign(out.u.size(), 0.0);
    for (std::size_t j = 0; j < dists.size(); ++j) {
        for (std::size_t i = 0; i < out.u.size(); ++i) {
            out.quantile[i] += weights[j] * dists[j].quantile[i];
        }
    }
    fill_value_grid(out);
    // Density via the reciprocal identity fbar(Qbar(u)) = 1 / qbar(u), with
    // qbar from centered differences of the averaged quantile samples; then
    // transferred to the value grid.
    auto qdens = centered_diff(out.u, out.quantile);
    std::vector<double> f_at_q(qdens.size());
    for (std::size_t i = 0; i < qdens.size(); ++i) {
        f_at_q[i] = qdens[i] > 0.0 ? 1.0 / qdens[i] : 0.0;
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double v = out.values[i];
        if (v < out.quantile.front() || v > out.quantile.back()) out.pdf[i] = 0.0;
        else out.pdf[i] = interp(out.quantile, f_at_q, v);
    }
    return out;
}

double moment(const NumericDistribution& d, int k) {
    if (k < 1) throw std::invalid_argument("moment: order must be >= 1");
    double s = 0.0;
    for (std::size_t i = 1; i < d.u.size(); ++i) {
        const double fa = std::pow(d.quantile[i - 1], k);
        const double fb = std::pow(d.quantile[i], k);
        s += 0.5 * (fa + fb) * (d.u[i] - d.u[i - 1]);
    }
    // Flat extrapolation over the clipped tails [0,u_min] and [u_max,1].
    s += d.u.front() * std::pow(d.quantile.front(), k);
    s += (1.0 - d.u.back()) * std::pow(d.quantile.back(), k);
    return s;
}

TailRatioTable tail_ratio_profile(const Gaussian& d1, const Gaussian& d2,
                                  std::array<double, 2> weights,
                                  std::span<const double> v_grid) {
    check_simplex(weights, 2);
    TailRatioTable table;
    const double sbar = weights[0] * d1.sd + weights[1] * d2.sd;
    const double mbar = weights[0] * d1.mean + weights[1] * d2.mean;
    const double lw0 = weights[0] > 0 ? std::log(weights[0]) : -std::numeric_limits<double>::infinity();
    const double lw1 = weights[1] > 0 ? std::log(weights[1]) : -std::numeric_limits<double>::infinity();
    for (double v : v_grid) {
        const double lf1 = d1.log_pdf(v);
        const double lf2 = d2.log_pdf(v);
        // Probability average: f = w1 f1 + w2 f2, in log space.
        double lmix;
        if (weights[1] == 0.0) lmix = lf1 + lw0;
        else if (weights[0] == 0.0) lmix = lf2 + lw1;
        else {
            const double a = lw0 + lf1, b = lw1 + lf2;
            const double m = std::max(a, b);
            lmix = m + std::log(std::exp(a - m) + std::exp(b - m));
        }
        // Quantile average at the shared latent z: 1/fbar = sum_j w_j / f_j(Q_j).
        const double z = (v - mbar) / sbar;
        const double lg1 = d1.log_pdf(d1.mean + d1.sd * z);
        const double lg2 = d2.log_pdf(d2.mean + d2.sd * z);
        double linv;
        if (weights[1] == 0.0) linv = lw0 - lg1;
        else if (weights[0] == 0.0) linv = lw1 - lg2;
        else {
            const double a = lw0 - lg1, b = lw1 - lg2;
            const double m = std::max(a, b);
            linv = m + std::log(std::exp(a - m) + std::exp(b - m));
        }
        const double lbar = -linv;
        const double prob_ratio = std::exp(lmix - lf1);
        const double quant_ratio = std::exp(lbar - lf1);
        if (!std::isfinite(prob_ratio) || !std::isfinite(quant_ratio) ||
            prob_ratio == 0.0 || quant_ratio == 0.0) {
            ++table.underflow_skipped;
            continue;
        }
        table.rows.push_back({v, prob_ratio, quant_ratio});
    }
    return table;
}

} // namespace qagg::dist
