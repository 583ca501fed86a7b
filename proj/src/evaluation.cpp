#include "refcast/evaluation.hpp"

#include "refcast/common.hpp"
#include "refcast/csv.hpp"
#include "refcast/forecast.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace refcast {

SkipCounters& SkipCounters::operator+=(const SkipCounters& o) {
    window += o.window;
    missing_predictor += o.missing_predictor;
    missing_outcome += o.missing_outcome;
    class_too_small += o.class_too_small;
    return *this;
}

double ks_statistic(std::span<const double> pit_values) {
    if (pit_values.empty()) throw DataError("KS statistic of an empty sample");
    std::vector<double> p(pit_values.begin(), pit_values.end());
    std::sort(p.begin(), p.end());
    const double m = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double above = static_cast<double>(i + 1) / m - p[i];
        double below = p[i] - static_cast<double>(i) / m;
        d = std::max(d, std::max(above, below));
    }
    return std::sqrt(m) * d;
}

double cvm_statistic(std::span<const double> pit_values) {
    if (pit_values.empty()) throw DataError("CvM statistic of an empty sample");
    std::vector<double> p(pit_values.begin(), pit_values.end());
    std::sort(p.begin(), p.end());
    const double m = static_cast<double>(p.size());
    double acc = 1.0 / (12.0 * m);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double target = (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * m);
        acc += (p[i] - target) * (p[i] - target);
    }
    return acc;
}

std::span<const double> quantile_deviation_levels() {
    static const double kLevels[] = {0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99};
    return {kLevels, 9};
}

double quantile_deviation(std::span<const double> pit_values) {
    if (pit_values.size() < 2) throw DataError("quantile deviation needs >= 2 values");
    std::vector<double> p(pit_values.begin(), pit_values.end());
    std::sort(p.begin(), p.end());
    double acc = 0.0;
    for (double level : quantile_deviation_levels())
        acc += std::abs(quantile_sorted(p, level) - level);
    return acc;
}

GofScores score_sample(const PitSample& sample) {
    GofScores s;
    s.m = static_cast<std::int64_t>(sample.m());
    s.skips = sample.skips;
    if (sample.m() >= 2) {
        s.delta_q = quantile_deviation(sample.values);
        s.ks = ks_statistic(sample.values);
        s.cvm = cvm_statistic(sample.values);
    } else {
        s.delta_q = missing_value();
        s.ks = missing_value();
        s.cvm = missing_value();
    }
    return s;
}

PitSample run_backtest(const Panel& panel, const PredictorTable& predictors,
                       const OutcomeTable& outcomes, const ClassParams& params,
                       const BacktestOptions& options) {
    params.validate();
    PitSample sample;
    sample.params = params;
    sample.cases_total = static_cast<std::int64_t>(panel.n_records());

    const auto& xcol = predictors.column(params.predictor);
    const auto& ycol = outcomes.outcomes(params.horizon);

    const int first_year = panel.start_year();
    const int last_year = panel.end_year();
    const std::size_t n_years = static_cast<std::size_t>(last_year - first_year) + 1;

    struct YearSlot {
        std::vector<double> pits;
        SkipCounters skips;
        std::int64_t violations = 0;
    };
    std::vector<YearSlot> slots(n_years);

    parallel_for(n_years, options.threads, [&](std::size_t yi) {
        const int t = first_year + static_cast<int>(yi);
        auto cases = panel.records_in_year(t);
        if (cases.empty()) return;
        YearSlot& slot = slots[yi];
        if (!window_ok(panel, t, params)) {
            slot.skips.window += static_cast<std::int64_t>(cases.size());
            return;
        }
        auto pool_res = collect_candidates(panel, predictors, outcomes, t, params);
        const CandidatePool& pool = pool_res.pool;
        for (std::size_t idx : cases) {
            double y = ycol[idx];
            if (is_missing(y)) {
                slot.skips.missing_outcome += 1;
                continue;
            }
            double x = xcol[idx];
            if (is_missing(x)) {
                slot.skips.missing_predictor += 1;
                continue;
            }
            CandidatePool self_pool;
            const CandidatePool* active = &pool;
            if (params.exclude_self) {
                auto own = collect_candidates(panel, predictors, outcomes, t, params,
                                              panel.firm_of_record(idx));
                self_pool = std::move(own.pool);
                active = &self_pool;
            }
            Selection sel = select_reference_class(*active, x, params);
            if (!sel.ok()) {
                slot.skips.class_too_small += 1;
                continue;
            }
            if (options.audit_no_lookahead) {
                for (std::size_t i = sel.begin; i < sel.end; ++i)
                    if (active->entries[i].year + params.horizon > t) slot.violations += 1;
            }
            std::int64_t at_or_below = 0;
            for (std::size_t i = sel.begin; i < sel.end; ++i)
                if (active->entries[i].outcome <= y) ++at_or_below;
            slot.pits.push_back(static_cast<double>(at_or_below) /
                                static_cast<double>(sel.size()));
        }
    });

    for (auto& slot : slots) {
        sample.values.insert(sample.values.end(), slot.pits.begin(), slot.pits.end());
        sample.skips += slot.skips;
        sample.lookahead_violations += slot.violations;
    }
    return sample;
}

GridSpec GridSpec::default_grid(std::vector<int> horizons) {
    GridSpec g;
    g.predictors = similarity_predictors();
    g.windows = {5, 10, 20, 30};
    g.sizes = {0.050, 0.025, 0.010};
    g.horizons = std::move(horizons);
    g.include_mauboussin = true;
    g.include_groups = true;
    return g;
}

namespace {

// Minimal TOML subset: comments, `key = scalar` and `key = [a, b, c]`.
// Strings may be quoted; nothing nested.
std::map<std::string, std::vector<std::string>> parse_flat_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open grid file: " + path);
    std::map<std::string, std::vector<std::string>> kv;
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
        while (!s.empty() && issp(s.back())) s.pop_back();
        std::size_t i = 0;
        while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
        return s.substr(i);
    };
    auto unquote = [&](std::string s) {
        s = trim(std::move(s));
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                              (s.front() == '\'' && s.back() == '\'')))
            return s.substr(1, s.size() - 2);
        return s;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path + " line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::vector<std::string> items;
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw DataError(path + " line " + std::to_string(line_no) +
                                ": arrays must close on the same line");
            std::string inner = value.substr(1, value.size() - 2);
            std::string item;
            for (char c : inner) {
                if (c == ',') {
                    if (!trim(item).empty()) items.push_back(unquote(item));
                    item.clear();
                } else {
                    item += c;
                }
            }
            if (!trim(item).empty()) items.push_back(unquote(item));
        } else {
            items.push_back(unquote(value));
        }
        kv[key] = std::move(items);
    }
    return kv;
}

}  // namespace

GridSpec GridSpec::from_toml(const std::string& path) {
    auto kv = parse_flat_toml(path);
    GridSpec g;
    auto ctx = [&](const std::string& key) { return path + " key " + key; };
    if (auto it = kv.find("predictors"); it != kv.end()) {
        for (const auto& tok : it->second) g.predictors.push_back(PredictorId::parse(tok));
    } else {
        g.predictors = similarity_predictors();
    }
    if (auto it = kv.find("windows"); it != kv.end()) {
        for (const auto& tok : it->second)
            g.windows.push_back(static_cast<int>(csv::parse_int(tok, ctx("windows")).value()));
    } else {
        g.windows = {5, 10, 20, 30};
    }
    if (auto it = kv.find("sizes"); it != kv.end()) {
        for (const auto& tok : it->second)
            g.sizes.push_back(csv::parse_double(tok, ctx("sizes")).value());
    } else {
        g.sizes = {0.050, 0.025, 0.010};
    }
    if (auto it = kv.find("horizons"); it != kv.end()) {
        for (const auto& tok : it->second)
            g.horizons.push_back(static_cast<int>(csv::parse_int(tok, ctx("horizons")).value()));
    }
    auto flag = [&](const char* key, bool dflt) {
        auto it = kv.find(key);
        if (it == kv.end() || it->second.empty()) return dflt;
        const std::string& v = it->second.front();
        if (v == "true") return true;
        if (v == "false") return false;
        throw DataError(ctx(key) + ": expected true or false");
    };
    g.include_mauboussin = flag("mauboussin", true);
    g.include_groups = flag("groups", true);
    if (auto it = kv.find("min_class"); it != kv.end())
        g.min_class = static_cast<int>(csv::parse_int(it->second.front(),
                                                      ctx("min_class")).value());
    for (const auto& id : g.predictors)
        if (id.is_categorical())
            throw DataError(path + ": group predictors are covered by `groups = true`, "
                            "not the similarity predictor list");
    return g;
}

std::vector<ClassParams> GridSpec::combinations(std::vector<std::string>* warnings) const {
    if (horizons.empty()) throw DataError("grid has no horizons");
    std::vector<ClassParams> out;
    std::set<std::tuple<int, int, std::string, int, long long>> seen;
    auto push = [&](ClassParams p) {
        p.min_class = min_class;
        long long size_key =
            p.uses_size() ? static_cast<long long>(std::llround(p.size_c * 1e9)) : -1;
        auto key = std::make_tuple(p.horizon, static_cast<int>(p.method), p.predictor.token(),
                                   p.window, size_key);
        if (!seen.insert(key).second) {
            if (warnings)
                warnings->push_back("duplicate grid entry dropped: " + p.predictor.token() +
                                    " w=" + std::to_string(p.window) + " h=" +
                                    std::to_string(p.horizon));
            return;
        }
        p.validate();
        out.push_back(p);
    };

    for (int h : horizons) {
        for (const auto& pred : predictors)
            for (int w : windows)
                for (double c : sizes)
                    push({pred, h, w, c, Method::similarity, min_class});
        if (include_mauboussin)
            for (int w : windows)
                push({{PredictorKind::sales, 0}, h, w, 0.0, Method::mauboussin, min_class});
        if (include_groups)
            for (int w : windows) {
                push({{PredictorKind::major_group, 0}, h, w, 0.0, Method::major_group, min_class});
                push({{PredictorKind::industry_group, 0},
                      h,
                      w,
                      0.0,
                      Method::industry_group,
                      min_class});
            }
    }
    return out;
}

std::vector<GridResult> run_grid(const Panel& panel, const PredictorTable& predictors,
                                 const OutcomeTable& outcomes, const GridSpec& grid,
                                 const BacktestOptions& options) {
    auto combos = grid.combinations();
    std::vector<GridResult> results(combos.size());
    int outer_threads = resolve_threads(options.threads);
    // Combinations run in parallel; inside a combination years go parallel
    // only when the grid is smaller than the worker count.
    BacktestOptions inner = options;
    inner.threads = combos.size() >= static_cast<std::size_t>(outer_threads) ? 1
                                                                             : options.threads;
    parallel_for(combos.size(), outer_threads, [&](std::size_t i) {
        PitSample sample = run_backtest(panel, predictors, outcomes, combos[i], inner);
        results[i].params = combos[i];
        results[i].scores = score_sample(sample);
    });
    assign_ranks(results);
    return results;
}

std::string measure_token(Measure m) {
    switch (m) {
        case Measure::delta_q: return "delta_q";
        case Measure::ks: return "ks";
        case Measure::cvm: return "cvm";
    }
    return "?";
}

Measure parse_measure(const std::string& token) {
    if (token == "delta_q") return Measure::delta_q;
    if (token == "ks") return Measure::ks;
    if (token == "cvm") return Measure::cvm;
    throw DataError("unknown measure: " + token + " (expected delta_q, ks or cvm)");
}

namespace {

double measure_value(const GofScores& s, Measure m) {
    switch (m) {
        case Measure::delta_q: return s.delta_q;
        case Measure::ks: return s.ks;
        case Measure::cvm: return s.cvm;
    }
    return 0;
}

// Total tie-break order so ranks are reproducible.
std::tuple<int, std::string, int, double> params_order_key(const ClassParams& p) {
    return {static_cast<int>(p.method), p.predictor.token(), p.window,
            p.uses_size() ? p.size_c : -1.0};
}

bool better(const GridResult& a, const GridResult& b, Measure m) {
    double va = measure_value(a.scores, m);
    double vb = measure_value(b.scores, m);
    bool ma = is_missing(va), mb = is_missing(vb);
    if (ma != mb) return mb;  // scored results rank ahead of empty ones
    if (!ma && va != vb) return va < vb;
    auto ta = std::make_tuple(a.scores.delta_q, a.scores.ks, a.scores.cvm);
    auto tb = std::make_tuple(b.scores.delta_q, b.scores.ks, b.scores.cvm);
    if (!ma && ta != tb) return ta < tb;
    return params_order_key(a.params) < params_order_key(b.params);
}

}  // namespace

void assign_ranks(std::vector<GridResult>& results) {
    std::map<int, std::vector<std::size_t>> by_horizon;
    for (std::size_t i = 0; i < results.size(); ++i)
        by_horizon[results[i].params.horizon].push_back(i);
    for (auto& [h, idxs] : by_horizon) {
        for (Measure m : {Measure::delta_q, Measure::ks, Measure::cvm}) {
            std::vector<std::size_t> order = idxs;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return better(results[a], results[b], m);
            });
            for (std::size_t r = 0; r < order.size(); ++r) {
                int rank = static_cast<int>(r) + 1;
                switch (m) {
                    case Measure::delta_q: results[order[r]].scores.rank_delta_q = rank; break;
                    case Measure::ks: results[order[r]].scores.rank_ks = rank; break;
                    case Measure::cvm: results[order[r]].scores.rank_cvm = rank; break;
                }
            }
        }
    }
}

std::vector<GridResult> rank_results(std::vector<GridResult> results, Measure by) {
    if (results.empty()) throw DataError("no results to rank");
    assign_ranks(results);
    std::sort(results.begin(), results.end(), [&](const GridResult& a, const GridResult& b) {
        if (a.params.horizon != b.params.horizon) return a.params.horizon < b.params.horizon;
        return better(a, b, by);
    });
    return results;
}

namespace {

std::string size_field(const ClassParams& p) {
    return p.uses_size() ? csv::format_double(p.size_c) : std::string();
}

}  // namespace

void write_results_csv(std::ostream& os, std::span<const GridResult> results) {
    csv::write_row(os, {"predictor", "window", "size", "method", "horizon", "m", "delta_q",
                        "delta_q_rank", "ks", "ks_rank", "cvm", "cvm_rank", "skipped_small",
                        "skipped_window", "skipped_missing"});
    for (const auto& r : results) {
        const auto& s = r.scores;
        csv::write_row(
            os, {r.params.predictor.token(), std::to_string(r.params.window), size_field(r.params),
                 method_token(r.params.method), std::to_string(r.params.horizon),
                 std::to_string(s.m), csv::format_double(s.delta_q),
                 std::to_string(s.rank_delta_q), csv::format_double(s.ks),
                 std::to_string(s.rank_ks), csv::format_double(s.cvm),
                 std::to_string(s.rank_cvm), std::to_string(s.skips.class_too_small),
                 std::to_string(s.skips.window),
                 std::to_string(s.skips.missing_predictor + s.skips.missing_outcome)});
    }
}

std::vector<GridResult> read_results_csv(const std::string& path) {
    auto table = csv::read_file(path);
    auto need = [&](const char* name) {
        int c = table.column(name);
        if (c < 0) throw DataError(path + ": missing column " + name);
        return c;
    };
    int c_pred = need("predictor"), c_window = need("window"), c_size = need("size");
    int c_method = need("method"), c_horizon = need("horizon"), c_m = need("m");
    int c_dq = need("delta_q"), c_dqr = need("delta_q_rank");
    int c_ks = need("ks"), c_ksr = need("ks_rank");
    int c_cvm = need("cvm"), c_cvmr = need("cvm_rank");
    int c_small = need("skipped_small"), c_win = need("skipped_window");
    int c_miss = need("skipped_missing");

    std::vector<GridResult> out;
    std::size_t row_no = 1;
    for (const auto& row : table.rows) {
        ++row_no;
        std::string ctx = path + " row " + std::to_string(row_no);
        GridResult r;
        r.params.predictor = PredictorId::parse(row.at(c_pred));
        r.params.window = static_cast<int>(csv::parse_int(row.at(c_window), ctx).value());
        r.params.method = parse_method(row.at(c_method));
        auto size = csv::parse_double(row.at(c_size), ctx);
        r.params.size_c = size.value_or(0.0);
        r.params.horizon = static_cast<int>(csv::parse_int(row.at(c_horizon), ctx).value());
        r.scores.m = csv::parse_int(row.at(c_m), ctx).value();
        auto num = [&](int col) {
            auto v = csv::parse_double(row.at(col), ctx);
            return v ? *v : missing_value();
        };
        r.scores.delta_q = num(c_dq);
        r.scores.ks = num(c_ks);
        r.scores.cvm = num(c_cvm);
        r.scores.rank_delta_q = static_cast<int>(csv::parse_int(row.at(c_dqr), ctx).value_or(0));
        r.scores.rank_ks = static_cast<int>(csv::parse_int(row.at(c_ksr), ctx).value_or(0));
        r.scores.rank_cvm = static_cast<int>(csv::parse_int(row.at(c_cvmr), ctx).value_or(0));
        r.scores.skips.class_too_small = csv::parse_int(row.at(c_small), ctx).value_or(0);
        r.scores.skips.window = csv::parse_int(row.at(c_win), ctx).value_or(0);
        r.scores.skips.missing_outcome = csv::parse_int(row.at(c_miss), ctx).value_or(0);
        out.push_back(std::move(r));
    }
    return out;
}

void write_rank_report_csv(std::ostream& os, std::span<const GridResult> ranked) {
    csv::write_row(os, {"predictor", "window", "size", "method", "horizon", "m", "delta_q",
                        "delta_q_rank", "ks", "ks_rank", "cvm", "cvm_rank",
                        "mean_abs_qdev_pp"});
    const double n_levels = static_cast<double>(quantile_deviation_levels().size());
    for (const auto& r : ranked) {
        const auto& s = r.scores;
        // delta_q is a sum over nine quantile levels; its mean, expressed in
        // percentage points, is the headline accuracy figure.
        double mean_abs_pp = is_missing(s.delta_q) ? missing_value()
                                                   : s.delta_q / n_levels * 100.0;
        csv::write_row(
            os, {r.params.predictor.display_name(), std::to_string(r.params.window),
                 size_field(r.params), method_token(r.params.method),
                 std::to_string(r.params.horizon), std::to_string(s.m),
                 csv::format_fixed(s.delta_q, 4), std::to_string(s.rank_delta_q),
                 csv::format_fixed(s.ks, 4), std::to_string(s.rank_ks),
                 csv::format_fixed(s.cvm, 4), std::to_string(s.rank_cvm),
                 csv::format_fixed(mean_abs_pp, 2)});
    }
}

std::vector<InfluenceRow> predictor_influence(const Panel& panel,
                                              const PredictorTable& predictors,
                                              const OutcomeTable& outcomes,
                                              const ClassParams& params, int anchor_year,
                                              std::span<const double> levels,
                                              double trim_alpha) {
    params.validate();
    static const double kDefaultLevels[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    if (levels.empty()) levels = {kDefaultLevels, 9};

    auto pool_res = collect_candidates(panel, predictors, outcomes, anchor_year, params);
    if (pool_res.skip == SkipReason::window)
        throw DataError("anchor year " + std::to_string(anchor_year) +
                        " does not admit a full window");
    const CandidatePool& pool = pool_res.pool;
    if (pool.size() == 0) throw DataError("candidate pool is empty for the anchor year");

    std::vector<InfluenceRow> rows;
    for (double level : levels) {
        InfluenceRow row;
        row.level = level;
        row.predictor_value = quantile_sorted(pool.xs, level);
        Selection sel = select_reference_class(pool, row.predictor_value, params);
        if (!sel.ok())
            throw DataError("candidate pool too small for a reference class at level " +
                            csv::format_double(level));
        auto outcomes_sample = class_outcomes(pool, sel);
        std::sort(outcomes_sample.begin(), outcomes_sample.end());
        row.class_size = outcomes_sample.size();
        row.median = quantile_sorted(outcomes_sample, 0.5);
        row.trimmed_mean = trimmed_mean(outcomes_sample, trim_alpha);
        row.trimmed_std =
            outcomes_sample.size() >= 2 ? trimmed_std(outcomes_sample, trim_alpha) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_influence_csv(std::ostream& os, std::span<const InfluenceRow> rows) {
    csv::write_row(os, {"level", "predictor_value", "median", "mean", "std", "class_size"});
    for (const auto& r : rows)
        csv::write_row(os, {csv::format_double(r.level), csv::format_double(r.predictor_value),
                            csv::format_double(r.median), csv::format_double(r.trimmed_mean),
                            csv::format_double(r.trimmed_std), std::to_string(r.class_size)});
}

}  // namespace refcast
