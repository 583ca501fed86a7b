#include "refcast/predictors.hpp"

#include "refcast/common.hpp"
#include "refcast/csv.hpp"
#include "refcast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace refcast {

namespace {

std::string ordinal_years(int k) {
    return std::to_string(k) + "-year";
}

}  // namespace

std::string PredictorId::token() const {
    switch (kind) {
        case PredictorKind::sales: return "sales";
        case PredictorKind::total_assets: return "total_assets";
        case PredictorKind::shareholder_equity: return "shareholder_equity";
        case PredictorKind::operating_margin: return "operating_margin";
        case PredictorKind::beta: return "beta";
        case PredictorKind::pe_ratio: return "pe_ratio";
        case PredictorKind::pb_ratio: return "pb_ratio";
        case PredictorKind::past_sales_cagr: return "past_sales_cagr_" + std::to_string(lag);
        case PredictorKind::op_margin_delta: return "op_margin_delta_" + std::to_string(lag);
        case PredictorKind::major_group: return "major_group";
        case PredictorKind::industry_group: return "industry_group";
    }
    return "?";
}

std::string PredictorId::display_name() const {
    switch (kind) {
        case PredictorKind::sales: return "sales";
        case PredictorKind::total_assets: return "total assets";
        case PredictorKind::shareholder_equity: return "shareholder equity";
        case PredictorKind::operating_margin: return "operating margin";
        case PredictorKind::beta: return "beta";
        case PredictorKind::pe_ratio: return "price-to-earnings ratio";
        case PredictorKind::pb_ratio: return "price-to-book ratio";
        case PredictorKind::past_sales_cagr: return "past " + ordinal_years(lag) + " sales CAGR";
        case PredictorKind::op_margin_delta: return ordinal_years(lag) + " op. margin delta";
        case PredictorKind::major_group: return "major group";
        case PredictorKind::industry_group: return "industry group";
    }
    return "?";
}

std::string PredictorId::description() const {
    switch (kind) {
        case PredictorKind::sales: return "deflated sales, million USD";
        case PredictorKind::total_assets: return "deflated total assets, million USD";
        case PredictorKind::shareholder_equity: return "deflated shareholder equity, million USD";
        case PredictorKind::operating_margin: return "EBIT / sales, %";
        case PredictorKind::beta: return "market beta (input column)";
        case PredictorKind::pe_ratio: return "price-to-earnings ratio (input column)";
        case PredictorKind::pb_ratio: return "price-to-book ratio (input column)";
        case PredictorKind::past_sales_cagr:
            return "sales CAGR over the past " + std::to_string(lag) + " year(s), %";
        case PredictorKind::op_margin_delta:
            return "operating margin change vs " + std::to_string(lag) + " year(s) ago, pp/year";
        case PredictorKind::major_group: return "two-digit SIC group; summary covers group sizes";
        case PredictorKind::industry_group:
            return "three-digit SIC group; summary covers group sizes";
    }
    return "?";
}

PredictorId PredictorId::parse(const std::string& token) {
    static const std::map<std::string, PredictorKind> kPlain = {
        {"sales", PredictorKind::sales},
        {"total_assets", PredictorKind::total_assets},
        {"shareholder_equity", PredictorKind::shareholder_equity},
        {"operating_margin", PredictorKind::operating_margin},
        {"beta", PredictorKind::beta},
        {"pe_ratio", PredictorKind::pe_ratio},
        {"pb_ratio", PredictorKind::pb_ratio},
        {"major_group", PredictorKind::major_group},
        {"industry_group", PredictorKind::industry_group},
    };
    if (auto it = kPlain.find(token); it != kPlain.end()) return {it->second, 0};
    for (auto [prefix, kind] : {std::pair{std::string("past_sales_cagr_"),
                                          PredictorKind::past_sales_cagr},
                                std::pair{std::string("op_margin_delta_"),
                                          PredictorKind::op_margin_delta}}) {
        if (token.rfind(prefix, 0) == 0) {
            int k = 0;
            try {
                k = std::stoi(token.substr(prefix.size()));
            } catch (...) {
                throw DataError("bad predictor token: " + token);
            }
            if (k < 1 || k > 10) throw DataError("predictor lag must be 1..10: " + token);
            return {kind, k};
        }
    }
    throw DataError("unknown predictor: " + token);
}

std::vector<PredictorId> all_predictors() {
    std::vector<PredictorId> ids = {
        {PredictorKind::total_assets, 0},   {PredictorKind::operating_margin, 0},
        {PredictorKind::sales, 0},          {PredictorKind::shareholder_equity, 0},
        {PredictorKind::major_group, 0},    {PredictorKind::industry_group, 0},
        {PredictorKind::beta, 0},           {PredictorKind::pb_ratio, 0},
        {PredictorKind::pe_ratio, 0},
    };
    for (int k = 1; k <= 10; ++k) ids.push_back({PredictorKind::past_sales_cagr, k});
    for (int k = 1; k <= 10; ++k) ids.push_back({PredictorKind::op_margin_delta, k});
    return ids;
}

std::vector<PredictorId> similarity_predictors() {
    std::vector<PredictorId> out;
    for (const auto& id : all_predictors())
        if (!id.is_categorical()) out.push_back(id);
    return out;
}

double operating_margin(std::optional<double> ebit, std::optional<double> sales) {
    if (!ebit || !sales || *sales == 0.0) return missing_value();
    return 100.0 * *ebit / *sales;
}

double past_sales_cagr(const Panel& panel, int firm_idx, int t, int k) {
    auto now = panel.sales_at(firm_idx, t);
    auto base = panel.sales_at(firm_idx, t - k);
    if (!now || !base || *base <= 0.0) return missing_value();
    if (*now == 0.0) return -100.0;
    return 100.0 * (std::pow(*now / *base, 1.0 / static_cast<double>(k)) - 1.0);
}

double forward_sales_cagr(const Panel& panel, int firm_idx, int t, int h) {
    auto now = panel.sales_at(firm_idx, t);
    auto later = panel.sales_at(firm_idx, t + h);
    if (!now || !later || *now <= 0.0) return missing_value();
    if (*later == 0.0) return -100.0;
    return 100.0 * (std::pow(*later / *now, 1.0 / static_cast<double>(h)) - 1.0);
}

double op_margin_delta(const Panel& panel, int firm_idx, int t, int k) {
    std::size_t now_idx = panel.find_record(firm_idx, t);
    std::size_t then_idx = panel.find_record(firm_idx, t - k);
    if (now_idx == Panel::npos || then_idx == Panel::npos) return missing_value();
    const auto& now = panel.record(now_idx);
    const auto& then = panel.record(then_idx);
    double m_now = operating_margin(now.ebit, now.sales);
    double m_then = operating_margin(then.ebit, then.sales);
    if (is_missing(m_now) || is_missing(m_then)) return missing_value();
    return (m_now - m_then) / static_cast<double>(k);
}

int major_group_of(int sic) {
    return sic / 100;
}

int industry_group_of(int sic) {
    return sic / 10;
}

PredictorTable PredictorTable::build(const Panel& panel) {
    PredictorTable t;
    auto ids = all_predictors();
    t.columns_.assign(ids.size(), std::vector<double>(panel.n_records(), missing_value()));
    for (std::size_t c = 0; c < ids.size(); ++c) {
        const auto& id = ids[c];
        auto& col = t.columns_[c];
        for (std::size_t i = 0; i < panel.n_records(); ++i) {
            const auto& r = panel.record(i);
            switch (id.kind) {
                case PredictorKind::sales:
                    if (r.sales) col[i] = *r.sales;
                    break;
                case PredictorKind::total_assets:
                    if (r.total_assets) col[i] = *r.total_assets;
                    break;
                case PredictorKind::shareholder_equity:
                    if (r.shareholder_equity) col[i] = *r.shareholder_equity;
                    break;
                case PredictorKind::operating_margin:
                    col[i] = operating_margin(r.ebit, r.sales);
                    break;
                case PredictorKind::beta:
                    if (r.beta) col[i] = *r.beta;
                    break;
                case PredictorKind::pe_ratio:
                    if (r.pe_ratio) col[i] = *r.pe_ratio;
                    break;
                case PredictorKind::pb_ratio:
                    if (r.pb_ratio) col[i] = *r.pb_ratio;
                    break;
                case PredictorKind::past_sales_cagr:
                    col[i] = past_sales_cagr(panel, panel.firm_of_record(i), r.fiscal_year, id.lag);
                    break;
                case PredictorKind::op_margin_delta:
                    col[i] = op_margin_delta(panel, panel.firm_of_record(i), r.fiscal_year, id.lag);
                    break;
                case PredictorKind::major_group:
                    if (r.sic) col[i] = static_cast<double>(major_group_of(*r.sic));
                    break;
                case PredictorKind::industry_group:
                    if (r.sic) col[i] = static_cast<double>(industry_group_of(*r.sic));
                    break;
            }
        }
    }
    return t;
}

const std::vector<double>& PredictorTable::column(const PredictorId& id) const {
    static const std::vector<PredictorId> kOrder = all_predictors();
    for (std::size_t c = 0; c < kOrder.size(); ++c)
        if (kOrder[c] == id) return columns_[c];
    throw DataError("unknown predictor: " + id.token());
}

OutcomeTable OutcomeTable::build(const Panel& panel, std::span<const int> horizons) {
    OutcomeTable t;
    for (int h : horizons) {
        if (h < 1) throw DataError("forecast horizon must be >= 1");
        if (t.has_horizon(h)) continue;
        std::vector<double> col(panel.n_records(), missing_value());
        for (std::size_t i = 0; i < panel.n_records(); ++i)
            col[i] = forward_sales_cagr(panel, panel.firm_of_record(i),
                                        panel.record(i).fiscal_year, h);
        t.horizons_.push_back(h);
        t.columns_.push_back(std::move(col));
    }
    return t;
}

bool OutcomeTable::has_horizon(int h) const {
    return std::find(horizons_.begin(), horizons_.end(), h) != horizons_.end();
}

const std::vector<double>& OutcomeTable::outcomes(int h) const {
    for (std::size_t i = 0; i < horizons_.size(); ++i)
        if (horizons_[i] == h) return columns_[i];
    throw DataError("outcome table has no horizon " + std::to_string(h));
}

std::vector<PredictorSummaryRow> summarize_predictors(const PredictorTable& table) {
    std::vector<PredictorSummaryRow> rows;
    for (const auto& id : all_predictors()) {
        PredictorSummaryRow row;
        row.id = id;
        row.description = id.description();
        const auto& col = table.column(id);

        std::vector<double> values;
        if (id.is_categorical()) {
            // Summarize the sizes of the distinct groups.
            std::map<int, std::size_t> sizes;
            std::size_t missing = 0;
            for (double v : col) {
                if (is_missing(v))
                    ++missing;
                else
                    sizes[static_cast<int>(v)] += 1;
            }
            for (const auto& [code, count] : sizes)
                values.push_back(static_cast<double>(count));
            row.missing = missing;
        } else {
            std::size_t missing = 0;
            for (double v : col) {
                if (is_missing(v))
                    ++missing;
                else
                    values.push_back(v);
            }
            row.missing = missing;
        }

        row.n = values.size();
        if (!values.empty()) {
            std::sort(values.begin(), values.end());
            row.q025 = quantile_sorted(values, 0.025);
            row.q25 = quantile_sorted(values, 0.25);
            row.median = quantile_sorted(values, 0.5);
            row.q75 = quantile_sorted(values, 0.75);
            row.q975 = quantile_sorted(values, 0.975);
            row.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                       static_cast<double>(values.size());
        } else {
            row.q025 = row.q25 = row.median = row.q75 = row.q975 = missing_value();
            row.mean = missing_value();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_predictor_summary_csv(std::ostream& os, std::span<const PredictorSummaryRow> rows) {
    csv::write_row(os, {"predictor", "description", "q2_5", "q25", "median", "mean", "q75",
                        "q97_5", "missings"});
    for (const auto& row : rows) {
        csv::write_row(os, {row.id.display_name(), row.description, csv::format_double(row.q025),
                            csv::format_double(row.q25), csv::format_double(row.median),
                            csv::format_double(row.mean), csv::format_double(row.q75),
                            csv::format_double(row.q975), std::to_string(row.missing)});
    }
}

}  // namespace refcast
