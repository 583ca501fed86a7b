#include "refcast/refclass.hpp"

#include "refcast/common.hpp"
#include "refcast/synth.hpp"
#include "helpers.hpp"

#include "doctest.h"

#include <cmath>
#include <set>

using namespace refcast;

namespace {

// Pool with the given predictor values; outcomes mirror the values so the
// member set is visible through the outcomes too.
CandidatePool make_pool(const std::vector<double>& xs, int year = 1990) {
    CandidatePool pool;
    pool.case_year = year + 5;
    for (std::size_t i = 0; i < xs.size(); ++i)
        pool.entries.push_back({xs[i], year, static_cast<int>(i), i, xs[i]});
    std::sort(pool.entries.begin(), pool.entries.end(),
              [](const PoolEntry& a, const PoolEntry& b) {
                  if (a.x != b.x) return a.x < b.x;
                  if (a.year != b.year) return a.year < b.year;
                  return a.firm_idx < b.firm_idx;
              });
    pool.xs.resize(pool.entries.size());
    for (std::size_t i = 0; i < pool.entries.size(); ++i) pool.xs[i] = pool.entries[i].x;
    return pool;
}

std::multiset<double> member_values(const CandidatePool& pool, const Selection& sel) {
    std::multiset<double> out;
    for (std::size_t i = sel.begin; i < sel.end; ++i) out.insert(pool.entries[i].x);
    return out;
}

ClassParams similarity_params(double c, int min_class = 20) {
    ClassParams p;
    p.predictor = {PredictorKind::beta, 0};
    p.horizon = 1;
    p.window = 5;
    p.size_c = c;
    p.method = Method::similarity;
    p.min_class = min_class;
    return p;
}

std::vector<double> iota_values(int n) {
    std::vector<double> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(i);
    return xs;
}

}  // namespace

TEST_CASE("similarity selection: interior case takes c/2 each side") {
    auto pool = make_pool(iota_values(100));
    auto sel = select_similarity_class(pool, 50.5, similarity_params(0.10, 10));
    REQUIRE(sel.ok());
    std::multiset<double> expect;
    for (int v = 46; v <= 55; ++v) expect.insert(v);
    CHECK(member_values(pool, sel) == expect);
}

TEST_CASE("similarity selection: tail case takes the top fraction c") {
    auto pool = make_pool(iota_values(100));
    auto sel = select_similarity_class(pool, 1000.0, similarity_params(0.10, 10));
    REQUIRE(sel.ok());
    std::multiset<double> expect;
    for (int v = 91; v <= 100; ++v) expect.insert(v);
    CHECK(member_values(pool, sel) == expect);

    auto bottom = select_similarity_class(pool, -5.0, similarity_params(0.10, 10));
    REQUIRE(bottom.ok());
    std::multiset<double> expect_lo;
    for (int v = 1; v <= 10; ++v) expect_lo.insert(v);
    CHECK(member_values(pool, bottom) == expect_lo);
}

TEST_CASE("min-class rule: 2*floor(1.5) = 2 < 20 skips") {
    auto pool = make_pool(iota_values(300));
    auto sel = select_similarity_class(pool, 150.0, similarity_params(0.01));
    CHECK_FALSE(sel.ok());
    CHECK(sel.skip == SkipReason::class_too_small);
}

TEST_CASE("class size never depends on the case's rank") {
    synth::Rng rng(31);
    std::vector<double> xs(437);
    for (auto& v : xs) v = rng.normal();
    auto pool = make_pool(xs);
    ClassParams p = similarity_params(0.05, 2);
    std::size_t expected = 2 * static_cast<std::size_t>(std::floor(0.05 * 437.0 / 2.0));
    for (double probe : {-99.0, -1.5, -0.2, 0.0, 0.3, 1.7, 99.0}) {
        auto sel = select_similarity_class(pool, probe, p);
        REQUIRE(sel.ok());
        CHECK(sel.size() == expected);
    }
}

TEST_CASE("rank invariance under strictly increasing transforms") {
    synth::Rng rng(47);
    std::vector<double> xs(200);
    for (auto& v : xs) v = rng.normal() * 2.0;
    auto transform = [](double v) { return std::exp(v / 3.0) * 10.0 - 4.0; };

    auto pool_raw = make_pool(xs);
    std::vector<double> txs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) txs[i] = transform(xs[i]);
    auto pool_tr = make_pool(txs);

    ClassParams p = similarity_params(0.10, 4);
    for (int trial = 0; trial < 25; ++trial) {
        double probe = rng.normal() * 2.5;
        auto a = select_similarity_class(pool_raw, probe, p);
        auto b = select_similarity_class(pool_tr, transform(probe), p);
        REQUIRE(a.ok() == b.ok());
        if (!a.ok()) continue;
        // Same rank interval selects the same firms.
        std::set<int> firms_a, firms_b;
        for (std::size_t i = a.begin; i < a.end; ++i)
            firms_a.insert(pool_raw.entries[i].firm_idx);
        for (std::size_t i = b.begin; i < b.end; ++i)
            firms_b.insert(pool_tr.entries[i].firm_idx);
        CHECK(firms_a == firms_b);
    }
}

TEST_CASE("mauboussin deciles and top percentile, hand-enumerated") {
    auto pool = make_pool(iota_values(1000));
    ClassParams p;
    p.predictor = {PredictorKind::sales, 0};
    p.method = Method::mauboussin;
    p.min_class = 5;

    auto top = select_mauboussin_class(pool, 5000.0, p);
    REQUIRE(top.ok());
    std::multiset<double> expect_top;
    for (int v = 991; v <= 1000; ++v) expect_top.insert(v);
    CHECK(member_values(pool, top) == expect_top);

    auto first = select_mauboussin_class(pool, 55.0, p);
    REQUIRE(first.ok());
    std::multiset<double> expect_first;
    for (int v = 1; v <= 100; ++v) expect_first.insert(v);
    CHECK(member_values(pool, first) == expect_first);
}

TEST_CASE("mauboussin buckets partition the pool") {
    synth::Rng rng(8);
    std::vector<double> xs(777);
    for (auto& v : xs) v = std::exp(rng.normal());
    auto pool = make_pool(xs);
    ClassParams p;
    p.predictor = {PredictorKind::sales, 0};
    p.method = Method::mauboussin;
    p.min_class = 1;

    // Every candidate's own value must land in exactly the bucket that
    // contains it, and bucket membership must cover each entry once.
    std::vector<int> covered(pool.size(), 0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto sel = select_mauboussin_class(pool, pool.entries[i].x, p);
        REQUIRE(sel.ok());
        CHECK(i >= sel.begin);
        CHECK(i < sel.end);
        seen.insert({sel.begin, sel.end});
    }
    std::size_t total = 0;
    std::size_t prev_end = 0;
    for (auto [b, e] : seen) {
        CHECK(b == prev_end);  // contiguous, non-overlapping
        prev_end = e;
        total += e - b;
    }
    CHECK(total == pool.size());
}

TEST_CASE("group selection matches SIC digits") {
    // Case SIC 2834 vs candidate 2899: same major group, different industry.
    CHECK(major_group_of(2834) == major_group_of(2899));
    CHECK(industry_group_of(2834) != industry_group_of(2899));

    std::vector<double> codes;
    for (int i = 0; i < 30; ++i) codes.push_back(28);
    for (int i = 0; i < 7; ++i) codes.push_back(35);
    auto pool = make_pool(codes);
    ClassParams p;
    p.predictor = {PredictorKind::major_group, 0};
    p.method = Method::major_group;

    auto big = select_group_class(pool, 28, p);
    REQUIRE(big.ok());
    CHECK(big.size() == 30);

    auto small = select_group_class(pool, 35, p);  // 7 < 20
    CHECK_FALSE(small.ok());
    CHECK(small.skip == SkipReason::class_too_small);

    auto all = select_group_class(pool, 28, p);
    for (std::size_t i = all.begin; i < all.end; ++i)
        CHECK(pool.entries[i].x == doctest::Approx(28.0));
}

TEST_CASE("candidate window arithmetic") {
    // w=5, h=3, t=2010 admits candidate years 2003..2007.
    std::vector<FirmYearRecord> records;
    for (int y = 2000; y <= 2014; ++y) {
        for (int f = 0; f < 3; ++f) {
            auto r = test_helpers::rec("F" + std::to_string(f), y, 100.0 + y - 2000);
            r.beta = static_cast<double>(f) + 0.1 * (y - 2000);
            records.push_back(r);
        }
    }
    Panel panel = Panel::from_records(records);
    auto ptable = PredictorTable::build(panel);
    auto otable = OutcomeTable::build(panel, std::array{3});

    ClassParams p;
    p.predictor = {PredictorKind::beta, 0};
    p.horizon = 3;
    p.window = 5;
    p.method = Method::similarity;
    p.size_c = 0.5;
    p.min_class = 2;

    auto res = collect_candidates(panel, ptable, otable, 2010, p);
    REQUIRE(res.skip == SkipReason::none);
    REQUIRE(res.pool.size() > 0);
    int min_year = res.pool.entries.front().year, max_year = min_year;
    for (const auto& e : res.pool.entries) {
        min_year = std::min(min_year, e.year);
        max_year = std::max(max_year, e.year);
    }
    CHECK(min_year == 2003);
    CHECK(max_year == 2007);

    // Earliest legal case year: start + w + h - 1.
    CHECK_FALSE(window_ok(panel, 2000 + 5 + 3 - 2, p));
    CHECK(window_ok(panel, 2000 + 5 + 3 - 1, p));
    auto skipped = collect_candidates(panel, ptable, otable, 2006, p);
    CHECK(skipped.skip == SkipReason::window);

    // No candidate carries the predictor: pool is empty, selection skips.
    ClassParams p_pe = p;
    p_pe.predictor = {PredictorKind::pe_ratio, 0};
    auto empty = collect_candidates(panel, ptable, otable, 2010, p_pe);
    CHECK(empty.skip == SkipReason::none);
    CHECK(empty.pool.size() == 0);
    auto sel = select_similarity_class(empty.pool, 1.0, p_pe);
    CHECK_FALSE(sel.ok());
}

TEST_CASE("no lookahead: member years satisfy s + h <= t") {
    synth::SynthSpec spec;
    spec.n_firms = 50;
    spec.n_years = 20;
    spec.seed = 12;
    auto sp = synth::generate_panel(spec);
    auto ptable = PredictorTable::build(sp.panel);
    auto otable = OutcomeTable::build(sp.panel, std::array{1});

    ClassParams p;
    p.predictor = {PredictorKind::beta, 0};
    p.horizon = 1;
    p.window = 10;
    p.size_c = 0.5;
    p.min_class = 5;

    for (int t = sp.panel.start_year(); t <= sp.panel.end_year(); ++t) {
        if (!window_ok(sp.panel, t, p)) continue;
        auto res = collect_candidates(sp.panel, ptable, otable, t, p);
        auto sel = select_similarity_class(res.pool, 0.0, p);
        if (!sel.ok()) continue;
        for (std::size_t i = sel.begin; i < sel.end; ++i)
            CHECK(res.pool.entries[i].year + p.horizon <= t);
    }
}

TEST_CASE("exclude-self drops only the case firm") {
    synth::SynthSpec spec;
    spec.n_firms = 20;
    spec.n_years = 15;
    spec.seed = 3;
    auto sp = synth::generate_panel(spec);
    auto ptable = PredictorTable::build(sp.panel);
    auto otable = OutcomeTable::build(sp.panel, std::array{1});

    ClassParams p;
    p.predictor = {PredictorKind::beta, 0};
    p.horizon = 1;
    p.window = 8;
    p.size_c = 0.5;

    auto with_self = collect_candidates(sp.panel, ptable, otable, 1983, p);
    auto without = collect_candidates(sp.panel, ptable, otable, 1983, p, 0);
    CHECK(without.pool.size() < with_self.pool.size());
    for (const auto& e : without.pool.entries) CHECK(e.firm_idx != 0);
}

TEST_CASE("invalid parameter combinations are rejected") {
    ClassParams p;
    p.predictor = {PredictorKind::major_group, 0};
    p.method = Method::similarity;
    CHECK_THROWS_AS(p.validate(), DataError);

    ClassParams m;
    m.predictor = {PredictorKind::beta, 0};
    m.method = Method::mauboussin;
    CHECK_THROWS_AS(m.validate(), DataError);

    ClassParams ok;
    ok.predictor = {PredictorKind::op_margin_delta, 6};
    ok.size_c = 0.025;
    CHECK_NOTHROW(ok.validate());
}
