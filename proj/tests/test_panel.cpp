#include "refcast/panel.hpp"

#include "refcast/common.hpp"
#include "helpers.hpp"

#include "doctest.h"

#include <set>

using namespace refcast;
using test_helpers::TempDir;
using test_helpers::rec;
using test_helpers::write_file;

namespace {

const char* kSmallPanel =
    "firm_id,fiscal_year,fye_month,sales,ebit,total_assets,shareholder_equity,sic,beta,pe_ratio,pb_ratio\n"
    "F1,2000,12,200,20,400,150,2834,1.1,15,2.5\n"
    "F1,2001,12,220,25,420,160,2834,1.0,16,2.4\n"
    "F2,2000,12,50,-5,80,30,2899,,,\n"
    "F2,2001,12,55,2,85,31,2899,,,\n"
    "SOLO,2001,12,10,,,,,,,\n";

}  // namespace

TEST_CASE("deflation divides by CPI over 100") {
    TempDir dir;
    write_file(dir.file("p.csv"),
               "firm_id,fiscal_year,sales\n"
               "F1,2000,200\n"
               "F1,2001,210\n");
    write_file(dir.file("cpi.csv"),
               "year,month,cpi\n"
               "2000,12,172.2\n"
               "2001,12,177.1\n");
    Panel p = load_panel(dir.file("p.csv"), dir.file("cpi.csv"));
    auto s2000 = p.sales_at(p.firm_index("F1"), 2000);
    REQUIRE(s2000.has_value());
    CHECK(*s2000 == doctest::Approx(200.0 / 1.722).epsilon(1e-12));
    CHECK(*s2000 == doctest::Approx(116.144).epsilon(1e-4));
}

TEST_CASE("single-observation firms are dropped and counted") {
    TempDir dir;
    write_file(dir.file("p.csv"), kSmallPanel);
    LoadStats stats;
    Panel p = load_panel(dir.file("p.csv"), std::nullopt, {}, &stats);
    CHECK(p.n_firms() == 2);
    CHECK(p.firm_index("SOLO") == -1);
    CHECK(stats.firms_dropped_single == 1);
    CHECK(stats.rows_dropped_single == 1);
    CHECK(stats.rows_kept == 4);
}

TEST_CASE("firms without any sales are dropped") {
    std::vector<FirmYearRecord> records{rec("A", 2000, 10), rec("A", 2001, 12)};
    FirmYearRecord b1, b2;
    b1.firm_id = b2.firm_id = "B";
    b1.fiscal_year = 2000;
    b2.fiscal_year = 2001;
    b1.ebit = 5;  // fundamentals but never sales
    records.push_back(b1);
    records.push_back(b2);
    LoadStats stats;
    Panel p = Panel::from_records(records, {}, &stats);
    CHECK(p.n_firms() == 1);
    CHECK(stats.firms_dropped_no_sales == 1);
    CHECK(stats.rows_dropped_no_sales == 2);
}

TEST_CASE("duplicate firm-year is a hard error naming the pair") {
    std::vector<FirmYearRecord> records{rec("F1", 2000, 10), rec("F1", 2000, 11),
                                        rec("F1", 2001, 12)};
    CHECK_THROWS_WITH_AS(Panel::from_records(records), doctest::Contains("F1"), DataError);
}

TEST_CASE("malformed rows are rejected with their row number") {
    TempDir dir;
    write_file(dir.file("p.csv"),
               "firm_id,fiscal_year,sales\n"
               "F1,2000,100\n"
               "F1,2001,not_a_number\n");
    CHECK_THROWS_WITH_AS(load_panel(dir.file("p.csv"), std::nullopt),
                         doctest::Contains("row 3"), DataError);
    write_file(dir.file("neg.csv"),
               "firm_id,fiscal_year,sales\n"
               "F1,2000,-5\n"
               "F1,2001,10\n");
    CHECK_THROWS_WITH_AS(load_panel(dir.file("neg.csv"), std::nullopt),
                         doctest::Contains("row 2"), DataError);
}

TEST_CASE("CPI gap is a hard error") {
    TempDir dir;
    write_file(dir.file("p.csv"),
               "firm_id,fiscal_year,sales\n"
               "F1,2000,100\n"
               "F1,2001,110\n");
    write_file(dir.file("cpi.csv"), "year,month,cpi\n2000,12,170\n");
    CHECK_THROWS_WITH_AS(load_panel(dir.file("p.csv"), dir.file("cpi.csv")),
                         doctest::Contains("CPI gap"), DataError);
}

TEST_CASE("financial-sector rows drop only behind the flag") {
    std::vector<FirmYearRecord> records{rec("BANK", 2000, 10), rec("BANK", 2001, 12),
                                        rec("MFG", 2000, 10), rec("MFG", 2001, 12)};
    records[0].sic = records[1].sic = 6020;
    records[2].sic = records[3].sic = 2834;

    Panel keep = Panel::from_records(records);
    CHECK(keep.n_firms() == 2);

    LoadOptions opts;
    opts.exclude_financial_sic = true;
    LoadStats stats;
    Panel dropped = Panel::from_records(records, opts, &stats);
    CHECK(dropped.n_firms() == 1);
    CHECK(stats.rows_excluded_sic == 2);
}

TEST_CASE("survivorship rate") {
    // Two firms over 2000-2001, one only in 2000 with another year to keep
    // it in the panel at 1999.
    std::vector<FirmYearRecord> records{rec("A", 2000, 1), rec("A", 2001, 1),
                                        rec("B", 2000, 1), rec("B", 2001, 1),
                                        rec("C", 1999, 1), rec("C", 2000, 1)};
    Panel p = Panel::from_records(records);

    SUBCASE("hand-enumerated h=1") {
        // Eligible (t+1 <= 2001): A2000, B2000, C1999, C2000 plus none of
        // the 2001 rows. Survivors: A2000, B2000, C1999.
        CHECK(survivorship_rate(p, 1) == doctest::Approx(3.0 / 4.0));
    }
    SUBCASE("full survival") {
        std::vector<FirmYearRecord> full{rec("A", 2000, 1), rec("A", 2001, 1),
                                         rec("B", 2000, 1), rec("B", 2001, 1)};
        CHECK(survivorship_rate(Panel::from_records(full), 1) == doctest::Approx(1.0));
    }
    SUBCASE("horizon beyond the span errors") {
        CHECK_THROWS_AS((void)survivorship_rate(p, 5), DataError);
    }
}

TEST_CASE("survivorship enumeration: two survivors among three year-2000 cases") {
    // Firm C leaves after 2000 (its 1999 record keeps it past the singleton
    // filter). Among the three cases observed in 2000, two reach 2001.
    std::vector<FirmYearRecord> records{rec("A", 2000, 1), rec("A", 2001, 1),
                                        rec("B", 2000, 1), rec("B", 2001, 1),
                                        rec("C", 1999, 1), rec("C", 2000, 1)};
    Panel p = Panel::from_records(records);
    std::size_t eligible = 0, survived = 0;
    for (std::size_t i = 0; i < p.n_records(); ++i) {
        if (p.record(i).fiscal_year != 2000) continue;
        ++eligible;
        if (p.find_record(p.firm_of_record(i), 2001) != Panel::npos) ++survived;
    }
    CHECK(eligible == 3);
    CHECK(static_cast<double>(survived) / static_cast<double>(eligible) ==
          doctest::Approx(2.0 / 3.0));
}

TEST_CASE("indices round-trip the record multiset") {
    TempDir dir;
    write_file(dir.file("p.csv"), kSmallPanel);
    Panel p = load_panel(dir.file("p.csv"), std::nullopt);

    std::multiset<std::pair<std::string, int>> by_firm, by_year;
    for (std::size_t f = 0; f < p.n_firms(); ++f) {
        auto span = p.records_of_firm(static_cast<int>(f));
        for (std::size_t i = span.begin; i < span.end; ++i)
            by_firm.insert({p.record(i).firm_id, p.record(i).fiscal_year});
    }
    for (int y = p.start_year(); y <= p.end_year(); ++y)
        for (std::size_t i : p.records_in_year(y))
            by_year.insert({p.record(i).firm_id, p.record(i).fiscal_year});
    CHECK(by_firm == by_year);
    CHECK(by_firm.size() == p.n_records());
}

TEST_CASE("cache round-trip is byte identical and loads back") {
    TempDir dir;
    write_file(dir.file("p.csv"), kSmallPanel);
    Panel p = load_panel(dir.file("p.csv"), std::nullopt);
    save_panel_cache(p, dir.file("a.bin"));
    save_panel_cache(p, dir.file("b.bin"));
    CHECK(test_helpers::read_file(dir.file("a.bin")) ==
          test_helpers::read_file(dir.file("b.bin")));

    Panel q = load_panel_cache(dir.file("a.bin"));
    CHECK(q.n_records() == p.n_records());
    CHECK(q.n_firms() == p.n_firms());
    for (std::size_t i = 0; i < p.n_records(); ++i) {
        CHECK(q.record(i).firm_id == p.record(i).firm_id);
        CHECK(q.record(i).fiscal_year == p.record(i).fiscal_year);
        CHECK(q.record(i).sales == p.record(i).sales);
        CHECK(q.record(i).ebit == p.record(i).ebit);
        CHECK(q.record(i).sic == p.record(i).sic);
    }
    CHECK(is_panel_cache(dir.file("a.bin")));
    CHECK_FALSE(is_panel_cache(dir.file("p.csv")));
}
