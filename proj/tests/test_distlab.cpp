#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qagg/distlab.hpp"
#include "qagg/rng.hpp"

using namespace qagg;
using namespace qagg::dist;

namespace {

const UGrid& grid() {
    static UGrid g = UGrid::standard();
    return g;
}

// Positions of strict local maxima of the density, ignoring near-zero mass.
std::vector<double> density_modes(const NumericDistribution& d) {
    std::vector<double> modes;
    double peak = *std::max_element(d.pdf.begin(), d.pdf.end());
    for (std::size_t i = 1; i + 1 < d.pdf.size(); ++i) {
        if (d.pdf[i] > d.pdf[i - 1] && d.pdf[i] > d.pdf[i + 1] && d.pdf[i] > 0.05 * peak) {
            modes.push_back(d.values[i]);
        }
    }
    return modes;
}

} // namespace

TEST_CASE("averaging a single distribution is the identity") {
    auto d = sample_gaussian({1.0, 0.5}, grid());
    std::vector<NumericDistribution> one{d};
    std::vector<double> w{1.0};
    auto pa = probability_average(one, w);
    auto qa = quantile_average(one, w);
    for (std::size_t i = 0; i < d.u.size(); i += 97) {
        CHECK(pa.quantile[i] == doctest::Approx(d.quantile[i]).epsilon(1e-9));
        CHECK(qa.quantile[i] == doctest::Approx(d.quantile[i]).epsilon(1e-12));
    }
}

TEST_CASE("mix of identical distributions is that distribution") {
    auto d = sample_gaussian({-0.5, 1.2}, grid());
    std::vector<NumericDistribution> two{d, d};
    std::vector<double> w{0.3, 0.7};
    auto pa = probability_average(two, w);
    auto qa = quantile_average(two, w);
    for (std::size_t i = 0; i < d.u.size(); i += 131) {
        CHECK(pa.quantile[i] == doctest::Approx(d.quantile[i]).epsilon(1e-9));
        CHECK(qa.quantile[i] == doctest::Approx(d.quantile[i]).epsilon(1e-12));
    }
}

TEST_CASE("probability average of the figure pair is bimodal") {
    auto d1 = sample_gaussian({1.0, 0.25}, grid());
    auto d2 = sample_gaussian({3.0, 0.5}, grid());
    std::vector<NumericDistribution> ds{d1, d2};
    std::vector<double> w{0.5, 0.5};
    auto pa = probability_average(ds, w);
    auto modes = density_modes(pa);
    REQUIRE(modes.size() == 2);
    CHECK(std::fabs(modes[0] - 1.0) < 0.1);
    CHECK(std::fabs(modes[1] - 3.0) < 0.1);

    // The quantile average of the same pair stays unimodal.
    auto qa = quantile_average(ds, w);
    CHECK(density_modes(qa).size() == 1);
}

TEST_CASE("quantile average of Gaussians is the location-scale member") {
    auto d1 = sample_gaussian({1.0, 0.25}, grid());
    auto d2 = sample_gaussian({3.0, 0.5}, grid());
    std::vector<NumericDistribution> ds{d1, d2};
    std::vector<double> w{0.5, 0.5};
    auto qa = quantile_average(ds, w);
    auto target = sample_gaussian({2.0, 0.375}, grid());
    double sup = 0.0;
    for (std::size_t i = 0; i < qa.u.size(); ++i) {
        if (qa.u[i] < 0.001 || qa.u[i] > 0.999) continue;
        sup = std::max(sup, std::fabs(qa.quantile[i] - target.quantile[i]));
    }
    CHECK(sup < 1e-8);

    // Equal means for probability and quantile averages of the pair.
    auto pa = probability_average(ds, w);
    CHECK(moment(qa, 1) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::fabs(moment(pa, 1) - moment(qa, 1)) < 1e-3);
}

TEST_CASE("moments") {
    auto std_normal = sample_gaussian({0.0, 1.0}, grid());
    CHECK(std::fabs(moment(std_normal, 1)) < 1e-3);

    auto g = sample_gaussian({2.0, 0.375}, grid());
    CHECK(moment(g, 2) == doctest::Approx(4.140625).epsilon(1e-3));

    std::vector<double> flat(grid().u.size(), 1.7);
    auto point_mass = from_quantile_samples(grid(), flat);
    CHECK(moment(point_mass, 1) == doctest::Approx(1.7));
    CHECK(moment(point_mass, 3) == doctest::Approx(1.7 * 1.7 * 1.7));
}

TEST_CASE("mean equality and sharpness over random Gaussian pairs") {
    Rng rng(77);
    for (int it = 0; it < 25; ++it) {
        Gaussian g1{rng.uniform(-2, 2), rng.uniform(0.3, 1.5)};
        Gaussian g2{rng.uniform(-2, 2), rng.uniform(0.3, 1.5)};
        double w1 = rng.uniform(0.05, 0.95);
        std::vector<NumericDistribution> ds{sample_gaussian(g1, grid()),
                                            sample_gaussian(g2, grid())};
        std::vector<double> w{w1, 1.0 - w1};
        auto pa = probability_average(ds, w);
        auto qa = quantile_average(ds, w);
        CHECK(std::fabs(moment(pa, 1) - moment(qa, 1)) < 1e-3);
        CHECK(moment(qa, 2) <= moment(pa, 2) + 1e-6);
        CHECK(moment(qa, 4) <= moment(pa, 4) + 1e-6);
    }
}

TEST_CASE("tail ratios for a nested Gaussian pair") {
    Gaussian f1{0.0, 1.0};
    Gaussian f2{0.0, 0.25};
    std::vector<double> v;
    for (double x = 4.0; x <= 8.0001; x += 0.05) v.push_back(x);
    auto table = tail_ratio_profile(f1, f2, {0.5, 0.5}, v);
    REQUIRE(table.rows.size() == v.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        // Probability average inherits the heavier tail; quantile average thins it.
        CHECK(r.quant_avg_ratio < r.prob_avg_ratio);
        if (i > 0) CHECK(r.quant_avg_ratio < table.rows[i - 1].quant_avg_ratio);
    }
    CHECK(table.rows.back().prob_avg_ratio == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("degenerate tail-profile weights") {
    Gaussian f1{0.0, 1.0};
    Gaussian f2{0.0, 0.5};
    std::vector<double> v{2.0, 4.0, 6.0};
    auto table = tail_ratio_profile(f1, f2, {1.0, 0.0}, v);
    for (const auto& r : table.rows) {
        CHECK(r.prob_avg_ratio == doctest::Approx(1.0));
        CHECK(r.quant_avg_ratio == doctest::Approx(1.0));
    }
}

TEST_CASE("weight simplex is enforced") {
    auto d = sample_gaussian({0.0, 1.0}, grid());
    std::vector<NumericDistribution> ds{d, d};
    std::vector<double> bad{0.6, 0.6};
    CHECK_THROWS_AS(probability_average(ds, bad), std::invalid_argument);
    std::vector<double> neg{1.5, -0.5};
    CHECK_THROWS_AS(quantile_average(ds, neg), std::invalid_argument);
}

TEST_CASE("numeric distribution invariants") {
    auto d = sample_gaussian({0.3, 0.8}, grid());
    CHECK(std::is_sorted(d.quantile.begin(), d.quantile.end()));
    CHECK(std::is_sorted(d.cdf.begin(), d.cdf.end()));
    CHECK(d.cdf.front() < 5e-4);
    CHECK(d.cdf.back() > 1.0 - 5e-4);
}
