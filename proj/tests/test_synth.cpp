#include "refcast/synth.hpp"

#include "refcast/common.hpp"
#include "refcast/evaluation.hpp"
#include "refcast/forecast.hpp"
#include "helpers.hpp"

#include "doctest.h"

#include <array>
#include <cmath>

using namespace refcast;

TEST_CASE("generation is deterministic for a fixed seed") {
    synth::SynthSpec spec;
    spec.n_firms = 30;
    spec.n_years = 10;
    spec.seed = 42;
    auto a = synth::generate_panel(spec);
    auto b = synth::generate_panel(spec);
    REQUIRE(a.panel.n_records() == b.panel.n_records());
    for (std::size_t i = 0; i < a.panel.n_records(); ++i) {
        CHECK(a.panel.record(i).firm_id == b.panel.record(i).firm_id);
        CHECK(a.panel.record(i).sales == b.panel.record(i).sales);
        CHECK(a.panel.record(i).beta == b.panel.record(i).beta);
    }

    test_helpers::TempDir dir;
    write_panel_csv(a.panel, dir.file("a.csv"));
    write_panel_csv(b.panel, dir.file("b.csv"));
    CHECK(test_helpers::read_file(dir.file("a.csv")) ==
          test_helpers::read_file(dir.file("b.csv")));
}

TEST_CASE("panel csv round-trip preserves the generated outcomes") {
    synth::SynthSpec spec;
    spec.n_firms = 25;
    spec.n_years = 8;
    spec.seed = 9;
    auto sp = synth::generate_panel(spec);
    test_helpers::TempDir dir;
    write_panel_csv(sp.panel, dir.file("p.csv"));
    Panel loaded = load_panel(dir.file("p.csv"), std::nullopt);
    REQUIRE(loaded.n_records() == sp.panel.n_records());
    auto a = OutcomeTable::build(sp.panel, std::array{1});
    auto b = OutcomeTable::build(loaded, std::array{1});
    const auto& ca = a.outcomes(1);
    const auto& cb = b.outcomes(1);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(is_missing(ca[i]) == is_missing(cb[i]));
        if (!is_missing(ca[i])) CHECK(ca[i] == cb[i]);  // shortest round-trip is exact
    }
}

TEST_CASE("forward cagr recovers the mechanism draw") {
    synth::SynthSpec spec;
    spec.n_firms = 10;
    spec.n_years = 6;
    spec.seed = 31;
    auto sp = synth::generate_panel(spec);
    auto outcomes = OutcomeTable::build(sp.panel, std::array{1});
    const auto& col = outcomes.outcomes(1);
    // Growth implied by consecutive sales must match the outcome column.
    for (std::size_t i = 0; i < sp.panel.n_records(); ++i) {
        const auto& r = sp.panel.record(i);
        auto later = sp.panel.sales_at(sp.panel.firm_of_record(i), r.fiscal_year + 1);
        if (!later || !r.sales || *r.sales <= 0.0) continue;
        double implied = 100.0 * (*later / *r.sales - 1.0);
        CHECK(col[i] == doctest::Approx(implied).epsilon(1e-12));
    }
}

TEST_CASE("true conditional cdf is calibrated on the generated data") {
    synth::SynthSpec spec;
    spec.n_firms = 1500;
    spec.n_years = 40;
    spec.seed = 1234;
    auto sp = synth::generate_panel(spec);
    auto outcomes = OutcomeTable::build(sp.panel, std::array{1});
    const auto& col = outcomes.outcomes(1);
    std::vector<double> pits;
    pits.reserve(sp.panel.n_records());
    for (std::size_t i = 0; i < sp.panel.n_records(); ++i) {
        if (is_missing(col[i])) continue;
        const auto& r = sp.panel.record(i);
        REQUIRE(r.beta.has_value());
        pits.push_back(sp.true_cdf(*r.beta, col[i]));
    }
    REQUIRE(pits.size() >= 50000);
    CHECK(quantile_deviation(pits) < 0.02);
}

TEST_CASE("monotone mechanism moves class medians") {
    synth::SynthSpec spec;
    spec.n_firms = 300;
    spec.n_years = 14;
    spec.seed = 8;
    auto sp = synth::generate_panel(spec);
    auto ptable = PredictorTable::build(sp.panel);
    auto otable = OutcomeTable::build(sp.panel, std::array{1});
    ClassParams params;
    params.predictor = {PredictorKind::beta, 0};
    params.horizon = 1;
    params.window = 8;
    params.size_c = 0.10;
    auto rows = predictor_influence(sp.panel, ptable, otable, params,
                                    sp.panel.end_year() - 1);
    CHECK(rows.front().median < rows.back().median);
}

TEST_CASE("degenerate specs are rejected") {
    synth::SynthSpec bad;
    bad.sigma_base = 0.0;
    CHECK_THROWS_AS((void)synth::generate_panel(bad), DataError);
    synth::SynthSpec one_year;
    one_year.n_years = 1;
    CHECK_THROWS_AS((void)synth::generate_panel(one_year), DataError);
    synth::SynthSpec bad_knots;
    bad_knots.g = synth::PiecewiseLinear{{0.0, 0.0}, {1.0, 2.0}};
    CHECK_THROWS_AS((void)synth::generate_panel(bad_knots), DataError);
}

TEST_CASE("oracle agrees with the production selector") {
    synth::Rng rng(555);
    int checked = 0;
    for (int trial = 0; trial < 250; ++trial) {
        std::size_t n = 30 + static_cast<std::size_t>(rng.uniform() * 2000.0);
        CandidatePool pool;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse grid of values forces plenty of ties.
            double x = std::floor(rng.normal() * 8.0) / 2.0;
            pool.entries.push_back({x, 1980 + static_cast<int>(i % 7),
                                    static_cast<int>(i), i, rng.normal()});
        }
        std::sort(pool.entries.begin(), pool.entries.end(),
                  [](const PoolEntry& a, const PoolEntry& b) {
                      if (a.x != b.x) return a.x < b.x;
                      if (a.year != b.year) return a.year < b.year;
                      return a.firm_idx < b.firm_idx;
                  });
        pool.xs.resize(pool.entries.size());
        for (std::size_t i = 0; i < pool.entries.size(); ++i) pool.xs[i] = pool.entries[i].x;

        ClassParams params;
        params.predictor = {PredictorKind::beta, 0};
        params.size_c = std::array{0.05, 0.025, 0.01, 0.5}[trial % 4];
        params.min_class = 10;

        double case_x;
        switch (trial % 5) {
            case 0: case_x = rng.normal() * 4.0; break;
            case 1: case_x = pool.xs.front() - 1.0; break;      // below all
            case 2: case_x = pool.xs.back() + 1.0; break;       // above all
            case 3: case_x = pool.xs[n / 2]; break;             // exact tie
            default: case_x = pool.xs[n / 4] + 0.25; break;
        }

        auto fast = select_similarity_class(pool, case_x, params);
        auto oracle = synth::oracle_class(pool, case_x, params);
        REQUIRE(fast.ok() == (oracle.skip == SkipReason::none));
        if (!fast.ok()) continue;
        REQUIRE(fast.size() == oracle.members.size());
        for (std::size_t k = 0; k < oracle.members.size(); ++k)
            CHECK(oracle.members[k] == fast.begin + k);
        ++checked;
    }
    CHECK(checked > 150);
}

TEST_CASE("rng uniforms live in the unit interval and normals standardize") {
    synth::Rng rng(1);
    double sum = 0.0, ss = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double z = rng.normal();
        sum += z;
        ss += z * z;
    }
    double mean = sum / n;
    double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
