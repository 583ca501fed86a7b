#pragma once

#include "refcast/panel.hpp"

#include <compare>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace refcast {

enum class PredictorKind {
    sales,
    total_assets,
    shareholder_equity,
    operating_margin,
    beta,
    pe_ratio,
    pb_ratio,
    past_sales_cagr,   // lag k in 1..10
    op_margin_delta,   // lag k in 1..10
    major_group,       // first two SIC digits (categorical)
    industry_group,    // first three SIC digits (categorical)
};

// Identifies one predictor variable. `lag` is only meaningful for the
// k-year sales CAGR and operating-margin delta families.
struct PredictorId {
    PredictorKind kind = PredictorKind::sales;
    int lag = 0;

    bool is_categorical() const {
        return kind == PredictorKind::major_group || kind == PredictorKind::industry_group;
    }
    bool has_lag() const {
        return kind == PredictorKind::past_sales_cagr || kind == PredictorKind::op_margin_delta;
    }

    // Stable token used in CLIs and files, e.g. "op_margin_delta_6".
    std::string token() const;
    // Human-readable name, e.g. "6-year op. margin delta".
    std::string display_name() const;
    std::string description() const;

    static PredictorId parse(const std::string& token);

    auto operator<=>(const PredictorId&) const = default;
};

// All predictor variables in summary-table order (29 entries: seven level
// variables, two SIC groups, ten CAGR lags, ten margin-delta lags).
std::vector<PredictorId> all_predictors();
// The 27 numeric predictors eligible for similarity classes (the groups are
// categorical and only valid for the group benchmark).
std::vector<PredictorId> similarity_predictors();

// Dense column per predictor, aligned with panel record indices. Missing
// values are NaN in the columns; use is_missing().
class PredictorTable {
public:
    static PredictorTable build(const Panel& panel);

    const std::vector<double>& column(const PredictorId& id) const;
    double value(const PredictorId& id, std::size_t record_idx) const {
        return column(id)[record_idx];
    }

private:
    std::vector<std::vector<double>> columns_;  // indexed by position in all_predictors()
};

// h-year forward sales CAGR per record, one column per horizon.
class OutcomeTable {
public:
    static OutcomeTable build(const Panel& panel, std::span<const int> horizons);

    bool has_horizon(int h) const;
    const std::vector<double>& outcomes(int h) const;
    std::span<const int> horizons() const { return horizons_; }

private:
    std::vector<int> horizons_;
    std::vector<std::vector<double>> columns_;
};

// EBIT over sales in percent; missing when either input is missing or
// sales is zero.
double operating_margin(std::optional<double> ebit, std::optional<double> sales);

// 100 * ((S_t / S_{t-k})^{1/k} - 1). Requires S_{t-k} > 0; S_t == 0 maps to
// the lower bound -100. Missing when either sales value is unavailable or
// the base is non-positive.
double past_sales_cagr(const Panel& panel, int firm_idx, int t, int k);

// Arithmetic change of operating margin over k years, per year (pp/year).
double op_margin_delta(const Panel& panel, int firm_idx, int t, int k);

// Same growth formula looking forward: 100 * ((S_{t+h} / S_t)^{1/h} - 1).
double forward_sales_cagr(const Panel& panel, int firm_idx, int t, int h);

int major_group_of(int sic);     // first two digits
int industry_group_of(int sic);  // first three digits

struct PredictorSummaryRow {
    PredictorId id;
    std::string description;
    double q025 = 0, q25 = 0, median = 0, mean = 0, q75 = 0, q975 = 0;
    std::size_t missing = 0;
    std::size_t n = 0;  // values entering the summary
};

// Summary-table layout: selected quantiles, mean and missing count per
// predictor. For the SIC groups the summarized values are the group sizes
// (observations per distinct group code).
std::vector<PredictorSummaryRow> summarize_predictors(const PredictorTable& table);

void write_predictor_summary_csv(std::ostream& os, std::span<const PredictorSummaryRow> rows);

}  // namespace refcast
