#include "refcast/forecast.hpp"

#include "refcast/common.hpp"
#include "refcast/synth.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <algorithm>
#include <vector>

using namespace refcast;

TEST_CASE("pit_evaluate uses the weak inequality") {
    EmpiricalDistribution d({1, 2, 3, 4});
    CHECK(pit_evaluate(d, 2.5) == doctest::Approx(0.5));
    CHECK(pit_evaluate(d, 2.0) == doctest::Approx(0.5));  // tie counts
    CHECK(pit_evaluate(d, 0.0) == 0.0);
    CHECK(pit_evaluate(d, 9.0) == 1.0);
}

TEST_CASE("pit_evaluate hits k/n at the k-th order statistic") {
    synth::Rng rng(11);
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) values.push_back(rng.normal() * 10.0);
    EmpiricalDistribution d(values);
    auto sorted = d.values();
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) continue;
        CHECK(pit_evaluate(d, sorted[k]) ==
              doctest::Approx(static_cast<double>(k + 1) / 100.0));
    }
}

TEST_CASE("quantile interpolates between order statistics") {
    EmpiricalDistribution d({1, 2, 3, 4});
    CHECK(quantile(d, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(d, 0.0) == 1.0);
    CHECK(quantile(d, 1.0) == 4.0);
    EmpiricalDistribution single({10});
    CHECK(quantile(single, 0.0) == 10.0);
    CHECK(quantile(single, 0.37) == 10.0);
    CHECK(quantile(single, 1.0) == 10.0);
    CHECK_THROWS_AS((void)quantile(d, 1.5), DataError);
    CHECK_THROWS_AS((void)quantile(d, -0.1), DataError);
}

TEST_CASE("quantile and pit are near-inverse inside the range") {
    // With interpolated quantiles the exact identity is the PIT round-trip:
    // re-evaluating the CDF at quantile(pit(x)) reproduces pit(x), and the
    // quantile never undercuts the largest outcome <= x.
    synth::Rng rng(5);
    std::vector<double> values;
    for (int i = 0; i < 200; ++i) values.push_back(rng.uniform() * 50.0 - 25.0);
    EmpiricalDistribution d(values);
    auto sorted = d.values();
    for (int i = 0; i < 50; ++i) {
        double x = rng.uniform() * 40.0 - 20.0;
        if (x < d.min() || x > d.max()) continue;
        double p = pit_evaluate(d, x);
        double v = quantile(d, p);
        CHECK(pit_evaluate(d, v) == doctest::Approx(p).epsilon(1e-12));
        auto k = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
        CHECK(v >= sorted[k - 1]);  // at least the k-th order statistic
        if (k < d.n()) CHECK(v <= sorted[k] + 1e-12);
    }
}

TEST_CASE("trimmed mean drops floor(alpha n) from each side") {
    std::vector<double> v;
    for (int i = 1; i <= 40; ++i) v.push_back(i);
    CHECK(trimmed_mean(v, 0.025) == doctest::Approx(20.5));

    std::vector<double> with_outlier;
    for (int i = 1; i <= 39; ++i) with_outlier.push_back(i);
    with_outlier.push_back(1e6);
    CHECK(trimmed_mean(with_outlier, 0.025) == doctest::Approx(20.5));

    // alpha = 0 is the ordinary mean / std.
    std::vector<double> small{3, 1, 4, 1, 5};
    CHECK(trimmed_mean(small, 0.0) == doctest::Approx(14.0 / 5.0));
    CHECK(trimmed_std(small, 0.0) ==
          doctest::Approx(std::sqrt((0.04 + 3.24 + 1.44 + 3.24 + 4.84) / 4.0)).epsilon(1e-9));
}

TEST_CASE("trimming errors") {
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS((void)trimmed_mean({}, 0.025), DataError);
    CHECK_THROWS_AS((void)trimmed_std(std::span<const double>(two.data(), 1), 0.0), DataError);
    CHECK_THROWS_AS((void)trimmed_mean(two, 0.5), DataError);
    // floor(0.4 * 2) = 0: nothing removed
    CHECK(trimmed_mean(two, 0.4) == doctest::Approx(1.5));
}

TEST_CASE("base rate buckets follow the right-closed convention") {
    EmpiricalDistribution d({-30, -22, 3, 50});
    auto t = base_rate_table(d, 0.0);
    CHECK(t.share_pct[0] == doctest::Approx(25.0));   // <= -25
    CHECK(t.share_pct[1] == doctest::Approx(25.0));   // ]-25,-20]
    CHECK(t.share_pct[6] == doctest::Approx(25.0));   // ]0,5]
    CHECK(t.share_pct[15] == doctest::Approx(25.0));  // > 45

    // Boundary: -20 belongs to ]-25,-20], not ]-20,-15].
    CHECK(BaseRateTable::bucket_of(-20.0) == 1);
    CHECK(BaseRateTable::bucket_of(-25.0) == 0);
    CHECK(BaseRateTable::bucket_of(45.0) == 14);
    CHECK(BaseRateTable::bucket_of(45.0001) == 15);
}

TEST_CASE("base rate shares sum to 100 and ignore order") {
    synth::Rng rng(17);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) values.push_back(rng.normal() * 30.0 + 5.0);
    auto t1 = base_rate_table(EmpiricalDistribution(values), 0.025);
    double sum = 0.0;
    for (double s : t1.share_pct) sum += s;
    CHECK(sum == doctest::Approx(100.0));

    std::reverse(values.begin(), values.end());
    auto t2 = base_rate_table(EmpiricalDistribution(values), 0.025);
    for (std::size_t b = 0; b < t1.share_pct.size(); ++b)
        CHECK(t1.share_pct[b] == t2.share_pct[b]);
}

TEST_CASE("bucket labels match the published table layout") {
    const auto& labels = BaseRateTable::bucket_labels();
    CHECK(labels.front() == "<= -25");
    CHECK(labels[1] == "]-25,-20]");
    CHECK(labels[14] == "]40,45]");
    CHECK(labels.back() == "> 45");
}

TEST_CASE("kde is symmetric for symmetric samples away from the bound") {
    std::vector<double> sample{-8, -5, -2, -1, 1, 2, 5, 8};
    EmpiricalDistribution d(sample);
    std::vector<double> grid, mirror;
    for (int i = -60; i <= 60; ++i) grid.push_back(static_cast<double>(i) * 0.5);
    auto dens = kde_density(d, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t j = grid.size() - 1 - i;  // grid[j] == -grid[i]
        CHECK(dens[i] == doctest::Approx(dens[j]).epsilon(1e-9));
    }
}

TEST_CASE("kde integrates to one over the support") {
    synth::Rng rng(23);
    std::vector<double> sample;
    for (int i = 0; i < 300; ++i) sample.push_back(rng.normal() * 25.0 + 10.0);
    for (auto& v : sample) v = std::max(v, -100.0);
    EmpiricalDistribution d(sample);
    double h = silverman_bandwidth(d);
    std::vector<double> grid;
    double lo = -100.0, hi = d.max() + 8.0 * h;
    for (int i = 0; i <= 4000; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 4000.0);
    auto dens = kde_density(d, grid);
    CHECK(test_oracles::trapezoid(grid, dens) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("reflection adds mass at the lower bound") {
    std::vector<double> sample{-99.5, -99, -98.5, -97, -96, -95};
    EmpiricalDistribution d(sample);
    double h = silverman_bandwidth(d);
    std::vector<double> grid{-100.0, -99.5, -99.0};
    auto reflected = kde_density(d, grid);
    // Plain (unreflected) estimate for comparison.
    auto plain = [&](double x) {
        double acc = 0.0;
        for (double xi : sample) {
            double z = (x - xi) / h;
            acc += std::exp(-0.5 * z * z);
        }
        return acc * 0.3989422804014327 / (h * static_cast<double>(sample.size()));
    };
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(reflected[i] >= plain(grid[i]));
}

TEST_CASE("kde rejects constant samples") {
    EmpiricalDistribution d({5, 5, 5, 5});
    std::vector<double> grid{0.0};
    CHECK_THROWS_AS((void)kde_density(d, grid), DataError);
}

TEST_CASE("place_estimates maps estimates monotonically") {
    EmpiricalDistribution d({-10, -5, 0, 5, 10, 20, 30});
    std::vector<double> estimates{-20, 0, 4, 25, 99};
    auto placed = place_estimates(d, estimates);
    CHECK(placed.front().second == 0.0);
    CHECK(placed.back().second == 1.0);
    for (std::size_t i = 1; i < placed.size(); ++i)
        CHECK(placed[i].second >= placed[i - 1].second);
    // Median maps to about one half.
    CHECK(pit_evaluate(d, quantile(d, 0.5)) == doctest::Approx(4.0 / 7.0));
}
