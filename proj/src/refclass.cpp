#include "refcast/refclass.hpp"

#include "refcast/common.hpp"
#include "refcast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace refcast {

std::string method_token(Method m) {
    switch (m) {
        case Method::similarity: return "similarity";
        case Method::mauboussin: return "mauboussin";
        case Method::major_group: return "major_group";
        case Method::industry_group: return "industry_group";
    }
    return "?";
}

Method parse_method(const std::string& token) {
    if (token == "similarity") return Method::similarity;
    if (token == "mauboussin") return Method::mauboussin;
    if (token == "major_group") return Method::major_group;
    if (token == "industry_group") return Method::industry_group;
    throw DataError("unknown method: " + token);
}

void ClassParams::validate() const {
    if (horizon < 1) throw DataError("horizon must be >= 1");
    if (window < 1) throw DataError("window must be >= 1");
    if (min_class < 1) throw DataError("min_class must be >= 1");
    if (method == Method::similarity) {
        if (!(size_c > 0.0 && size_c <= 1.0))
            throw DataError("relative class size must be in (0, 1]");
        if (predictor.is_categorical())
            throw DataError("categorical predictor '" + predictor.token() +
                            "' is not valid for similarity selection");
    }
    if (method == Method::mauboussin && predictor.kind != PredictorKind::sales)
        throw DataError("the mauboussin benchmark uses the sales predictor");
    if (method == Method::major_group && predictor.kind != PredictorKind::major_group)
        throw DataError("method major_group requires predictor major_group");
    if (method == Method::industry_group && predictor.kind != PredictorKind::industry_group)
        throw DataError("method industry_group requires predictor industry_group");
}

std::string skip_reason_token(SkipReason r) {
    switch (r) {
        case SkipReason::none: return "none";
        case SkipReason::window: return "window";
        case SkipReason::missing_predictor: return "missing_predictor";
        case SkipReason::missing_outcome: return "missing_outcome";
        case SkipReason::class_too_small: return "class_too_small";
    }
    return "?";
}

std::size_t CandidatePool::insertion_rank(double value) const {
    return static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), value) - xs.begin());
}

bool window_ok(const Panel& panel, int t, const ClassParams& params) {
    return t - params.horizon - params.window + 1 >= panel.start_year() &&
           t + params.horizon <= panel.end_year();
}

PoolResult collect_candidates(const Panel& panel, const PredictorTable& predictors,
                              const OutcomeTable& outcomes, int case_year,
                              const ClassParams& params, int exclude_firm_idx) {
    PoolResult res;
    res.pool.case_year = case_year;
    if (!window_ok(panel, case_year, params)) {
        res.skip = SkipReason::window;
        return res;
    }
    const auto& xcol = predictors.column(params.predictor);
    const auto& ycol = outcomes.outcomes(params.horizon);
    int first = case_year - params.horizon - params.window + 1;
    int last = case_year - params.horizon;
    auto& entries = res.pool.entries;
    for (int s = first; s <= last; ++s) {
        for (std::size_t idx : panel.records_in_year(s)) {
            double x = xcol[idx];
            double y = ycol[idx];
            if (is_missing(x) || is_missing(y)) continue;
            int firm = panel.firm_of_record(idx);
            if (firm == exclude_firm_idx) continue;
            entries.push_back({x, s, firm, idx, y});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const PoolEntry& a, const PoolEntry& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.year != b.year) return a.year < b.year;
        return a.firm_idx < b.firm_idx;
    });
    res.pool.xs.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) res.pool.xs[i] = entries[i].x;
    return res;
}

Selection select_similarity_class(const CandidatePool& pool, double case_x,
                                  const ClassParams& params) {
    Selection sel;
    sel.case_x = case_x;
    const std::size_t n = pool.size();
    if (n == 0) {
        sel.skip = SkipReason::class_too_small;
        return sel;
    }
    const auto n_half = static_cast<std::size_t>(
        std::floor(params.size_c * static_cast<double>(n) / 2.0));
    const std::size_t total = 2 * n_half;
    if (total < static_cast<std::size_t>(params.min_class)) {
        sel.skip = SkipReason::class_too_small;
        return sel;
    }
    const std::size_t ins = pool.insertion_rank(case_x);
    std::size_t take_below = std::min(n_half, ins);
    std::size_t take_above = std::min(n_half, n - ins);
    std::size_t lo = ins - take_below;
    std::size_t hi = ins + take_above;
    // Tail rule: refill the deficit from the other side, which yields the
    // top or bottom fraction c of the candidates.
    if (hi - lo < total) {
        if (take_below < n_half)
            hi = lo + total;
        else
            lo = hi - total;
    }
    sel.begin = lo;
    sel.end = hi;
    return sel;
}

std::vector<double> mauboussin_boundaries(const CandidatePool& pool) {
    std::vector<double> bounds;
    bounds.reserve(10);
    for (int d = 1; d <= 9; ++d)
        bounds.push_back(quantile_sorted(pool.xs, static_cast<double>(d) / 10.0));
    bounds.push_back(quantile_sorted(pool.xs, 0.99));
    return bounds;
}

Selection select_mauboussin_class(const CandidatePool& pool, double case_sales,
                                  const ClassParams& params) {
    Selection sel;
    sel.case_x = case_sales;
    if (pool.size() == 0) {
        sel.skip = SkipReason::class_too_small;
        return sel;
    }
    auto bounds = mauboussin_boundaries(pool);
    // Buckets are right-closed value intervals; values above every boundary
    // fall in the top-percentile bucket.
    std::size_t bucket = static_cast<std::size_t>(
        std::lower_bound(bounds.begin(), bounds.end(), case_sales) - bounds.begin());
    double lo_bound = bucket == 0 ? -std::numeric_limits<double>::infinity()
                                  : bounds[bucket - 1];
    double hi_bound = bucket < bounds.size() ? bounds[bucket]
                                             : std::numeric_limits<double>::infinity();
    sel.begin = static_cast<std::size_t>(
        std::upper_bound(pool.xs.begin(), pool.xs.end(), lo_bound) - pool.xs.begin());
    sel.end = static_cast<std::size_t>(
        std::upper_bound(pool.xs.begin(), pool.xs.end(), hi_bound) - pool.xs.begin());
    if (sel.size() < static_cast<std::size_t>(params.min_class)) {
        sel.skip = SkipReason::class_too_small;
        return sel;
    }
    return sel;
}

Selection select_group_class(const CandidatePool& pool, int case_group_code,
                             const ClassParams& params) {
    Selection sel;
    sel.case_x = static_cast<double>(case_group_code);
    auto range = std::equal_range(pool.xs.begin(), pool.xs.end(), sel.case_x);
    sel.begin = static_cast<std::size_t>(range.first - pool.xs.begin());
    sel.end = static_cast<std::size_t>(range.second - pool.xs.begin());
    if (sel.size() < static_cast<std::size_t>(params.min_class))
        sel.skip = SkipReason::class_too_small;
    return sel;
}

Selection select_reference_class(const CandidatePool& pool, double case_x,
                                 const ClassParams& params) {
    switch (params.method) {
        case Method::similarity: return select_similarity_class(pool, case_x, params);
        case Method::mauboussin: return select_mauboussin_class(pool, case_x, params);
        case Method::major_group:
        case Method::industry_group:
            return select_group_class(pool, static_cast<int>(case_x), params);
    }
    throw DataError("unknown method");
}

std::vector<double> class_outcomes(const CandidatePool& pool, const Selection& sel) {
    std::vector<double> out;
    out.reserve(sel.size());
    for (std::size_t i = sel.begin; i < sel.end; ++i) out.push_back(pool.entries[i].outcome);
    return out;
}

}  // namespace refcast
