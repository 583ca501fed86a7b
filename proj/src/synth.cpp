#include "refcast/synth.hpp"

#include "refcast/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace refcast::synth {

std::uint64_t Rng::next_u64() {
    // SplitMix64 step.
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller; u1 nudged away from zero so the log stays finite.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

int Rng::uniform_int(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next_u64() % span);
}

double PiecewiseLinear::operator()(double x) const {
    const auto n = xs.size();
    if (x <= xs.front()) {
        double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return ys[0] + slope * (x - xs[0]);
    }
    if (x >= xs.back()) {
        double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return ys[n - 1] + slope * (x - xs[n - 1]);
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    auto i = static_cast<std::size_t>(it - xs.begin());
    double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

void PiecewiseLinear::validate() const {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw DataError("mechanism needs >= 2 knots with matching values");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw DataError("mechanism knots must be strictly increasing");
        if (ys[i] < ys[i - 1]) throw DataError("mechanism must be monotone non-decreasing");
    }
}

void SynthSpec::validate() const {
    if (n_firms < 1 || n_years < 2) throw DataError("need at least one firm and two years");
    if (!(sigma_base > 0.0)) throw DataError("sigma_base must be positive");
    if (sigma_vslope < 0.0) throw DataError("sigma_vslope must be >= 0");
    if (!(x_persistence > -1.0 && x_persistence < 1.0))
        throw DataError("AR(1) persistence must lie in (-1, 1)");
    if (!(x_noise_sd > 0.0)) throw DataError("x_noise_sd must be positive");
    if (missing_rate < 0.0 || missing_rate >= 1.0)
        throw DataError("missing_rate must be in [0, 1)");
    g.validate();
}

double SynthSpec::sigma(double x) const {
    return sigma_base + sigma_vslope * std::abs(x - x_mean);
}

double TrueCdf::operator()(double x, double y) const {
    if (y < -100.0) return 0.0;
    double z = (y - spec.g(x)) / spec.sigma(x);
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

SynthPanel generate_panel(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Stationary start for the AR(1) predictor.
    const double x_stat_sd =
        spec.x_noise_sd / std::sqrt(1.0 - spec.x_persistence * spec.x_persistence);

    std::vector<FirmYearRecord> records;
    records.reserve(static_cast<std::size_t>(spec.n_firms) *
                    static_cast<std::size_t>(spec.n_years));

    for (int f = 0; f < spec.n_firms; ++f) {
        char name[16];
        std::snprintf(name, sizeof(name), "F%05d", f);

        // SIC constant per firm: a handful of divisions, three-digit detail.
        int major = 10 + 5 * rng.uniform_int(0, 9);  // 10,15,...,55
        int sic = major * 100 + rng.uniform_int(0, 9) * 10 + rng.uniform_int(0, 9);

        double x = spec.x_mean + x_stat_sd * rng.normal();
        double sales = 100.0 * std::exp(0.8 * rng.normal());
        double margin = 6.0 + 4.0 * rng.normal();  // operating margin, %

        for (int yi = 0; yi < spec.n_years; ++yi) {
            FirmYearRecord r;
            r.firm_id = name;
            r.fiscal_year = spec.start_year + yi;
            r.fye_month = 12;
            r.sales = sales;
            r.sic = sic;
            r.beta = x;                                 // generating predictor
            r.pe_ratio = 8.0 + 12.0 * rng.normal();     // independent noise predictor
            r.ebit = sales * margin / 100.0;
            r.total_assets = sales * std::exp(0.3 + 0.2 * rng.normal());
            r.shareholder_equity = *r.total_assets * 0.4;
            r.pb_ratio = std::exp(0.5 + 0.6 * rng.normal());
            if (spec.missing_rate > 0.0 && rng.uniform() < spec.missing_rate) {
                r.ebit.reset();
                r.total_assets.reset();
                r.shareholder_equity.reset();
                r.pb_ratio.reset();
            }
            records.push_back(std::move(r));

            // Evolve to the next year. Growth uses this year's predictor;
            // draws happen even in the final year to keep streams aligned.
            double growth = spec.g(x) + spec.sigma(x) * rng.normal();
            if (growth < -100.0) growth = -100.0;
            sales = sales * (1.0 + growth / 100.0);
            x = spec.x_mean + spec.x_persistence * (x - spec.x_mean) +
                spec.x_noise_sd * rng.normal();
            margin = 6.0 + 0.7 * (margin - 6.0) + 2.0 * rng.normal();
        }
    }

    SynthPanel out{Panel::from_records(std::move(records)), TrueCdf{spec}};
    return out;
}

OracleResult oracle_class(const CandidatePool& pool, double case_x, const ClassParams& params) {
    OracleResult res;
    const std::size_t n = pool.size();
    if (n == 0) {
        res.skip = SkipReason::class_too_small;
        return res;
    }

    // Independent re-sort of the entries by the same total order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const PoolEntry& ea = pool.entries[a];
        const PoolEntry& eb = pool.entries[b];
        if (ea.x != eb.x) return ea.x < eb.x;
        if (ea.year != eb.year) return ea.year < eb.year;
        return ea.firm_idx < eb.firm_idx;
    });

    const auto n_half = static_cast<std::size_t>(
        std::floor(params.size_c * static_cast<double>(n) / 2.0));
    if (2 * n_half < static_cast<std::size_t>(params.min_class)) {
        res.skip = SkipReason::class_too_small;
        return res;
    }

    // Walk to the case's position: candidates with x <= case_x come first
    // (any tie sorts before the case, whose year is later than every s).
    std::size_t rank = 0;
    while (rank < n && pool.entries[order[rank]].x <= case_x) ++rank;

    double u = static_cast<double>(rank) / static_cast<double>(n);
    std::vector<std::size_t> picked;
    if (u < params.size_c / 2.0) {
        // Bottom fraction c.
        for (std::size_t i = 0; i < 2 * n_half; ++i) picked.push_back(order[i]);
    } else if (u > 1.0 - params.size_c / 2.0) {
        // Top fraction c.
        for (std::size_t i = n - 2 * n_half; i < n; ++i) picked.push_back(order[i]);
    } else {
        // Two-sided scan around the case, refilling at the edges.
        std::size_t below = std::min(n_half, rank);
        std::size_t above = std::min(n_half, n - rank);
        if (below < n_half) above = 2 * n_half - below;
        if (above < n_half) below = 2 * n_half - above;
        for (std::size_t i = rank - below; i < rank + above; ++i) picked.push_back(order[i]);
    }
    std::sort(picked.begin(), picked.end());
    res.members = std::move(picked);
    return res;
}

}  // namespace refcast::synth
