#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qagg/grid.hpp"
#include "qagg/isotonic.hpp"
#include "qagg/rng.hpp"
#include "qagg/scoring.hpp"

using namespace qagg;

namespace {

// Independent L2-projection oracle for small m: enumerate every partition of
// {0..m-1} into consecutive blocks, pool each block, keep the candidates with
// nondecreasing block means, and return the closest one.
std::vector<double> brute_force_projection(const std::vector<double>& v) {
    const std::size_t m = v.size();
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    const unsigned n_masks = 1u << (m - 1);
    for (unsigned mask = 0; mask < n_masks; ++mask) {
        std::vector<double> cand(m);
        std::size_t start = 0;
        bool feasible = true;
        double prev_mean = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const bool boundary = (i == m - 1) || ((mask >> i) & 1u);
            if (!boundary) continue;
            double s = 0.0;
            for (std::size_t j = start; j <= i; ++j) s += v[j];
            const double mu = s / static_cast<double>(i - start + 1);
            if (mu < prev_mean - 1e-12) {
                feasible = false;
                break;
            }
            for (std::size_t j = start; j <= i; ++j) cand[j] = mu;
            prev_mean = mu;
            start = i + 1;
        }
        if (!feasible) continue;
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += (v[i] - cand[i]) * (v[i] - cand[i]);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }
    return best;
}

bool nondecreasing(const std::vector<double>& v) {
    return std::is_sorted(v.begin(), v.end());
}

double lp_norm(const std::vector<double>& a, const std::vector<double>& b, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (std::isinf(p)) s = std::max(s, d);
        else s += std::pow(d, p);
    }
    return std::isinf(p) ? s : std::pow(s, 1.0 / p);
}

std::vector<double> random_vec(Rng& rng, std::size_t m, double lo = -5, double hi = 5) {
    std::vector<double> v(m);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

} // namespace

TEST_CASE("sort_op basics") {
    auto r = sort_op(std::vector<double>{3, 1, 2});
    CHECK(r.values == std::vector<double>{1, 2, 3});
    CHECK(r.source == std::vector<std::size_t>{1, 2, 0});

    auto id = sort_op(std::vector<double>{1, 2, 3});
    CHECK(id.values == std::vector<double>{1, 2, 3});
    CHECK(id.source == std::vector<std::size_t>{0, 1, 2});

    auto tie = sort_op(std::vector<double>{2, 2, 1});
    CHECK(tie.values == std::vector<double>{1, 2, 2});
    CHECK(tie.source == std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("pava basics") {
    auto r = pava(std::vector<double>{1, 3, 2});
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(2.5));
    CHECK(r.values[2] == doctest::Approx(2.5));

    auto r2 = pava(std::vector<double>{2, 1});
    CHECK(r2.values == std::vector<double>{1.5, 1.5});

    auto id = pava(std::vector<double>{1, 2, 3});
    CHECK(id.values == std::vector<double>{1, 2, 3});
    CHECK(id.blocks.size() == 3);
}

TEST_CASE("pava matches brute-force projection for small m") {
    Rng rng(42);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t m = 2 + rng.below(3);
        auto v = random_vec(rng, m);
        auto got = pava(v).values;
        auto want = brute_force_projection(v);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::fabs(got[i] - want[i]) <= 1e-8);
        }
    }
}

TEST_CASE("min_max_sweep basics") {
    auto r = min_max_sweep(std::vector<double>{5, 3, 1}, 1);
    CHECK(r.values == std::vector<double>{3, 3, 3});

    auto r2 = min_max_sweep(std::vector<double>{1, 3, 2}, 1);
    CHECK(r2.values == std::vector<double>{1, 3, 3});

    auto id = min_max_sweep(std::vector<double>{1, 2, 3}, 1);
    CHECK(id.values == std::vector<double>{1, 2, 3});

    CHECK_THROWS_AS(min_max_sweep(std::vector<double>{1, 2}, 5), std::invalid_argument);
}

TEST_CASE("every operator lands in the isotonic cone") {
    Rng rng(9);
    for (int it = 0; it < 10000; ++it) {
        const std::size_t m = 1 + rng.below(12);
        auto v = random_vec(rng, m);
        CHECK(nondecreasing(sort_op(v).values));
        CHECK(nondecreasing(pava(v).values));
        CHECK(nondecreasing(min_max_sweep(v, rng.below(m)).values));
    }
}

TEST_CASE("sort and pava can only improve lp distance to an isotonic target") {
    Rng rng(13);
    for (int it = 0; it < 3000; ++it) {
        const std::size_t m = 2 + rng.below(8);
        auto target = random_vec(rng, m);
        std::sort(target.begin(), target.end());
        auto v = random_vec(rng, m);
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            CHECK(lp_norm(sort_op(v).values, target, p) <= lp_norm(v, target, p) + 1e-12);
            CHECK(lp_norm(pava(v).values, target, p) <= lp_norm(v, target, p) + 1e-12);
        }
    }
}

TEST_CASE("sort and pava can only improve the pinball sum") {
    Rng rng(17);
    for (int it = 0; it < 10000; ++it) {
        const std::size_t m = 2 + rng.below(6);
        QuantileGrid g = QuantileGrid::even(static_cast<int>(m));
        auto v = random_vec(rng, m);
        const double y = rng.uniform(-6, 6);
        const double before = pinball_sum(g, y, v);
        for (auto op : {IsoOperator::Sort, IsoOperator::Pava}) {
            auto out = apply_isotonic(op, v, m / 2).values;
            const double after = pinball_sum(g, y, out);
            CHECK(after <= before + 1e-12);
            if (out != v) CHECK(after < before);
        }
    }
}

TEST_CASE("min-max sweep can increase the pinball sum") {
    // Stored counterexample: the sweep drags the lower tail up past y.
    QuantileGrid g({0.25, 0.5, 0.75});
    std::vector<double> v{0.0, -1.0, 2.0};
    const double y = 0.0;
    auto swept = min_max_sweep(v, g.median_index());
    CHECK(swept.values == std::vector<double>{-1, -1, 2});
    const double before = pinball_sum(g, y, v);
    const double after = pinball_sum(g, y, swept.values);
    CHECK(before == doctest::Approx(1.0));
    CHECK(after == doctest::Approx(1.25));
    CHECK(after > before);
}

TEST_CASE("idempotence") {
    Rng rng(23);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t m = 1 + rng.below(9);
        auto v = random_vec(rng, m);
        const std::size_t anchor = rng.below(m);
        for (auto op : {IsoOperator::Sort, IsoOperator::Pava, IsoOperator::MinMaxSweep}) {
            auto once = apply_isotonic(op, v, anchor).values;
            auto twice = apply_isotonic(op, once, anchor).values;
            for (std::size_t i = 0; i < m; ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("backward maps match central finite differences away from ties") {
    Rng rng(29);
    const double h = 1e-6;
    int done = 0;
    while (done < 1000) {
        const std::size_t m = 2 + rng.below(7);
        auto v = random_vec(rng, m);
        // Reject near-ties so the operator is differentiable at v.
        double min_gap = std::numeric_limits<double>::infinity();
        auto s = v;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 1; i < m; ++i) min_gap = std::min(min_gap, s[i] - s[i - 1]);
        if (min_gap < 1e-3) continue;
        auto dir = random_vec(rng, m, -1, 1);
        const std::size_t anchor = rng.below(m);
        for (auto op : {IsoOperator::Sort, IsoOperator::Pava, IsoOperator::MinMaxSweep}) {
            auto res = apply_isotonic(op, v, anchor);
            auto jvp = res.jvp(dir);
            std::vector<double> vp = v, vm = v;
            for (std::size_t i = 0; i < m; ++i) {
                vp[i] += h * dir[i];
                vm[i] -= h * dir[i];
            }
            auto fp = apply_isotonic(op, vp, anchor).values;
            auto fm = apply_isotonic(op, vm, anchor).values;
            for (std::size_t i = 0; i < m; ++i) {
                const double fd = (fp[i] - fm[i]) / (2 * h);
                CHECK(std::fabs(fd - jvp[i]) <= 1e-6 * std::max(1.0, std::fabs(fd)));
            }
        }
        ++done;
    }
}

TEST_CASE("vjp is the transpose of jvp") {
    Rng rng(31);
    for (int it = 0; it < 500; ++it) {
        const std::size_t m = 2 + rng.below(7);
        auto v = random_vec(rng, m);
        auto a = random_vec(rng, m, -1, 1);
        auto b = random_vec(rng, m, -1, 1);
        const std::size_t anchor = rng.below(m);
        for (auto op : {IsoOperator::Sort, IsoOperator::Pava, IsoOperator::MinMaxSweep}) {
            auto res = apply_isotonic(op, v, anchor);
            auto ja = res.jvp(a);
            std::vector<double> jtb(m, 0.0);
            res.vjp(b, jtb);
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                lhs += b[i] * ja[i];
                rhs += jtb[i] * a[i];
            }
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}
