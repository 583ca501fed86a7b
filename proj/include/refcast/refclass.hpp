#pragma once

#include "refcast/panel.hpp"
#include "refcast/predictors.hpp"

#include <string>
#include <vector>

namespace refcast {

enum class Method { similarity, mauboussin, major_group, industry_group };

std::string method_token(Method m);
Method parse_method(const std::string& token);

// One predictor / hyper-parameter combination.
struct ClassParams {
    PredictorId predictor;
    int horizon = 1;          // h, years ahead
    int window = 5;           // w, candidate years before t-h
    double size_c = 0.05;     // relative class size; ignored for benchmarks
    Method method = Method::similarity;
    int min_class = 20;       // classes below this are skipped
    bool exclude_self = false;  // drop the case firm's own past observations

    bool uses_size() const { return method == Method::similarity; }
    void validate() const;  // throws DataError on contradictions
};

// Why a case produced no reference class.
enum class SkipReason {
    none,
    window,             // full window or outcome year outside the panel
    missing_predictor,  // case has no predictor value (incl. missing SIC)
    missing_outcome,    // realized h-year growth unavailable for the case
    class_too_small,    // fewer than min_class members (incl. empty pool)
};

std::string skip_reason_token(SkipReason r);

// One candidate observation (j, s) with predictor and realized outcome.
struct PoolEntry {
    double x = 0;              // predictor value X_{j,s}
    int year = 0;              // s
    int firm_idx = 0;          // j
    std::size_t record_idx = 0;
    double outcome = 0;        // Y_{j,s+h}
};

// All candidates for cases at one year t: observations (j,s) with
// t-h-w+1 <= s <= t-h and both predictor and outcome present. Entries are
// sorted ascending by (x, year, firm) — a total order, so selection is
// deterministic under ties.
struct CandidatePool {
    std::vector<PoolEntry> entries;
    std::vector<double> xs;  // entries[i].x, for binary searches
    int case_year = 0;

    std::size_t size() const { return entries.size(); }
    // Insertion rank of a case value: pool entries with x <= value sort
    // before any case observed at t (every candidate year s is < t).
    std::size_t insertion_rank(double value) const;
};

// A selected reference class. Every selection rule yields one contiguous
// rank interval [begin, end) of the sorted pool.
struct Selection {
    SkipReason skip = SkipReason::none;
    std::size_t begin = 0;
    std::size_t end = 0;
    double case_x = 0;

    bool ok() const { return skip == SkipReason::none; }
    std::size_t size() const { return end - begin; }
};

// True when t admits a full candidate window and a realized outcome year
// inside the panel.
bool window_ok(const Panel& panel, int t, const ClassParams& params);

// Builds the pool for cases at year t. Window violations are reported as a
// skip, not an error, so callers can account for them.
struct PoolResult {
    SkipReason skip = SkipReason::none;
    CandidatePool pool;
};
PoolResult collect_candidates(const Panel& panel, const PredictorTable& predictors,
                              const OutcomeTable& outcomes, int case_year,
                              const ClassParams& params, int exclude_firm_idx = -1);

// Rank-space nearest-neighbour selection: floor(c*N/2) candidates on each
// side of the case's insertion rank, refilling from the other side at the
// tails so the class size never depends on the case's rank.
Selection select_similarity_class(const CandidatePool& pool, double case_x,
                                  const ClassParams& params);

// Sales-decile buckets with the top percentile carved out of the tenth
// decile as an eleventh bucket; the class is the bucket holding the case.
Selection select_mauboussin_class(const CandidatePool& pool, double case_sales,
                                  const ClassParams& params);

// All candidates sharing the case's SIC group code.
Selection select_group_class(const CandidatePool& pool, int case_group_code,
                             const ClassParams& params);

// Dispatch on params.method.
Selection select_reference_class(const CandidatePool& pool, double case_x,
                                 const ClassParams& params);

// Outcome sample of the selected members.
std::vector<double> class_outcomes(const CandidatePool& pool, const Selection& sel);

// Decile boundaries (q10..q90) plus the top-percentile boundary (q99) of
// the pool's predictor values; exposed for the bucket-partition tests.
std::vector<double> mauboussin_boundaries(const CandidatePool& pool);

}  // namespace refcast
