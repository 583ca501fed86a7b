#include "refcast/forecast.hpp"

#include "refcast/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace refcast {

namespace {
constexpr double kLowerSupport = -100.0;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> outcomes)
    : values_(std::move(outcomes)) {
    if (values_.empty()) throw DataError("empirical distribution needs at least one outcome");
    std::sort(values_.begin(), values_.end());
}

double pit_evaluate(const EmpiricalDistribution& dist, double realized) {
    auto v = dist.values();
    auto count = std::upper_bound(v.begin(), v.end(), realized) - v.begin();
    return static_cast<double>(count) / static_cast<double>(v.size());
}

double quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw DataError("quantile of empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw DataError("quantile level outside [0,1]");
    if (sorted.size() == 1) return sorted[0];
    double pos = level * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= sorted.size() - 1) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(const EmpiricalDistribution& dist, double level) {
    return quantile_sorted(dist.values(), level);
}

namespace {

std::vector<double> trimmed_sorted(std::span<const double> values, double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw DataError("trim fraction must be in [0, 0.5)");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto cut = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(sorted.size())));
    if (2 * cut >= sorted.size()) throw DataError("trimming removes every value");
    return {sorted.begin() + static_cast<std::ptrdiff_t>(cut),
            sorted.end() - static_cast<std::ptrdiff_t>(cut)};
}

}  // namespace

double trimmed_mean(std::span<const double> values, double alpha) {
    auto kept = trimmed_sorted(values, alpha);
    return std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
}

double trimmed_std(std::span<const double> values, double alpha) {
    auto kept = trimmed_sorted(values, alpha);
    if (kept.size() < 2) throw DataError("trimmed standard deviation needs >= 2 values");
    double mean = std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
    double ss = 0.0;
    for (double v : kept) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(kept.size() - 1));
}

const std::array<double, 15>& BaseRateTable::edges() {
    static const std::array<double, 15> kEdges = {-25, -20, -15, -10, -5, 0, 5, 10,
                                                  15,  20,  25,  30,  35, 40, 45};
    return kEdges;
}

const std::array<std::string, BaseRateTable::kBuckets>& BaseRateTable::bucket_labels() {
    static const std::array<std::string, kBuckets> kLabels = {
        "<= -25",   "]-25,-20]", "]-20,-15]", "]-15,-10]", "]-10,-5]", "]-5,0]",
        "]0,5]",    "]5,10]",    "]10,15]",   "]15,20]",   "]20,25]",  "]25,30]",
        "]30,35]",  "]35,40]",   "]40,45]",   "> 45"};
    return kLabels;
}

std::size_t BaseRateTable::bucket_of(double value) {
    const auto& e = edges();
    // First edge >= value gives the right-closed bin; above the last edge
    // falls in the open top bucket.
    auto it = std::lower_bound(e.begin(), e.end(), value);
    return static_cast<std::size_t>(it - e.begin());
}

BaseRateTable base_rate_table(const EmpiricalDistribution& dist, double alpha) {
    BaseRateTable t;
    t.trim_alpha = alpha;
    t.n = dist.n();
    std::array<std::size_t, BaseRateTable::kBuckets> counts{};
    for (double v : dist.values()) counts[BaseRateTable::bucket_of(v)] += 1;
    for (std::size_t b = 0; b < counts.size(); ++b)
        t.share_pct[b] = 100.0 * static_cast<double>(counts[b]) / static_cast<double>(t.n);
    t.trimmed_mean = trimmed_mean(dist.values(), alpha);
    t.median = quantile(dist, 0.5);
    t.trimmed_std = dist.n() >= 2 ? trimmed_std(dist.values(), alpha) : 0.0;
    t.q025 = quantile(dist, 0.025);
    t.q975 = quantile(dist, 0.975);
    return t;
}

double silverman_bandwidth(const EmpiricalDistribution& dist) {
    if (dist.n() < 2) throw DataError("density estimation needs at least two outcomes");
    auto v = dist.values();
    double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (n - 1.0));
    double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    double h = 0.9 * spread * std::pow(n, -0.2);
    if (!(h > 0.0)) throw DataError("zero bandwidth: sample has no spread");
    return h;
}

std::vector<double> kde_density(const EmpiricalDistribution& dist, std::span<const double> grid) {
    double h = silverman_bandwidth(dist);
    auto v = dist.values();
    double norm = kInvSqrt2Pi / (static_cast<double>(v.size()) * h);
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double x = grid[g];
        if (x < kLowerSupport) continue;  // density is zero below the support
        double acc = 0.0;
        for (double xi : v) {
            double z = (x - xi) / h;
            // Mirror image of xi across the lower bound.
            double zr = (x - (2.0 * kLowerSupport - xi)) / h;
            acc += std::exp(-0.5 * z * z) + std::exp(-0.5 * zr * zr);
        }
        out[g] = norm * acc;
    }
    return out;
}

DensityCurve kde_curve(const EmpiricalDistribution& dist, std::size_t points) {
    if (points < 2) throw DataError("density grid needs at least two points");
    DensityCurve c;
    c.bandwidth = silverman_bandwidth(dist);
    double lo = std::max(kLowerSupport, dist.min() - 3.0 * c.bandwidth);
    double hi = dist.max() + 3.0 * c.bandwidth;
    c.grid.resize(points);
    double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) c.grid[i] = lo + step * static_cast<double>(i);
    c.density = kde_density(dist, c.grid);
    return c;
}

std::vector<std::pair<double, double>> place_estimates(const EmpiricalDistribution& dist,
                                                       std::span<const double> estimates) {
    std::vector<std::pair<double, double>> out;
    out.reserve(estimates.size());
    for (double e : estimates) out.emplace_back(e, pit_evaluate(dist, e));
    return out;
}

}  // namespace refcast
