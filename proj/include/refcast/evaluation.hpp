#pragma once

#include "refcast/panel.hpp"
#include "refcast/predictors.hpp"
#include "refcast/refclass.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace refcast {

// Case-level exclusion counters for one backtest run.
struct SkipCounters {
    std::int64_t window = 0;
    std::int64_t missing_predictor = 0;
    std::int64_t missing_outcome = 0;
    std::int64_t class_too_small = 0;

    std::int64_t total() const {
        return window + missing_predictor + missing_outcome + class_too_small;
    }
    SkipCounters& operator+=(const SkipCounters& o);
};

// The forecast probabilities {p_k} one parameter combination produced over
// all admissible initial cases, in (year, firm) case order.
struct PitSample {
    ClassParams params;
    std::vector<double> values;
    SkipCounters skips;
    std::int64_t cases_total = 0;
    std::int64_t lookahead_violations = 0;  // only filled when audited

    std::size_t m() const { return values.size(); }
};

// sqrt(m) * sup |F_m - F_0| over [0,1], via the order-statistics form.
double ks_statistic(std::span<const double> pit_values);
// m * integral (F_m - F_0)^2 dF_0 = 1/(12m) + sum (p_(i) - (2i-1)/(2m))^2.
double cvm_statistic(std::span<const double> pit_values);
// Sum of |q_lambda - lambda| over the nine levels 1,5,10,25,50,75,90,95,99%.
double quantile_deviation(std::span<const double> pit_values);
std::span<const double> quantile_deviation_levels();

struct GofScores {
    double delta_q = 0;
    double ks = 0;
    double cvm = 0;
    int rank_delta_q = 0;  // within the horizon's result set
    int rank_ks = 0;
    int rank_cvm = 0;
    std::int64_t m = 0;
    SkipCounters skips;
};

struct BacktestOptions {
    int threads = 1;                  // 0 = all hardware threads
    bool audit_no_lookahead = false;  // verify s + h <= t for every member
};

// Considers every observation (i, t) as an initial case, applies the window
// and availability constraints, selects the reference class and evaluates
// its empirical CDF at the realized growth. Deterministic: the PIT sample
// and counters do not depend on the thread count.
PitSample run_backtest(const Panel& panel, const PredictorTable& predictors,
                       const OutcomeTable& outcomes, const ClassParams& params,
                       const BacktestOptions& options = {});

GofScores score_sample(const PitSample& sample);

// Grid of combinations to backtest.
struct GridSpec {
    std::vector<PredictorId> predictors;  // numeric, for similarity classes
    std::vector<int> windows;
    std::vector<double> sizes;
    std::vector<int> horizons;
    bool include_mauboussin = true;
    bool include_groups = true;
    int min_class = 20;

    // 27 predictors x 4 windows x 3 sizes + 4 mauboussin + 8 group
    // combinations per horizon.
    static GridSpec default_grid(std::vector<int> horizons);
    // Minimal TOML subset: `key = value` scalars and flat arrays.
    static GridSpec from_toml(const std::string& path);

    // Expanded combinations; exact duplicates are dropped with a warning.
    std::vector<ClassParams> combinations(std::vector<std::string>* warnings = nullptr) const;
};

struct GridResult {
    ClassParams params;
    GofScores scores;
};

std::vector<GridResult> run_grid(const Panel& panel, const PredictorTable& predictors,
                                 const OutcomeTable& outcomes, const GridSpec& grid,
                                 const BacktestOptions& options = {});

enum class Measure { delta_q, ks, cvm };
std::string measure_token(Measure m);
Measure parse_measure(const std::string& token);

// Fills the per-measure rank columns; ranks are a permutation within each
// horizon's result set. Ties break by (delta_q, ks, cvm, params order).
void assign_ranks(std::vector<GridResult>& results);

// Ascending by the chosen measure (smaller is better for all three).
std::vector<GridResult> rank_results(std::vector<GridResult> results, Measure by);

// Backtest results CSV (stable column set; scores round-trip exactly).
void write_results_csv(std::ostream& os, std::span<const GridResult> results);
std::vector<GridResult> read_results_csv(const std::string& path);

// Ranked report with the derived mean-absolute-quantile-deviation column
// (delta_q / 9, printed in percentage points).
void write_rank_report_csv(std::ostream& os, std::span<const GridResult> ranked);

// Distribution shape across the predictor's deciles: synthetic cases at the
// candidate quantiles of `levels`, one row per level.
struct InfluenceRow {
    double level = 0;
    double predictor_value = 0;
    double median = 0;
    double trimmed_mean = 0;
    double trimmed_std = 0;
    std::size_t class_size = 0;
};

std::vector<InfluenceRow> predictor_influence(const Panel& panel,
                                              const PredictorTable& predictors,
                                              const OutcomeTable& outcomes,
                                              const ClassParams& params, int anchor_year,
                                              std::span<const double> levels = {},
                                              double trim_alpha = 0.025);

void write_influence_csv(std::ostream& os, std::span<const InfluenceRow> rows);

}  // namespace refcast
