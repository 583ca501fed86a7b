#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace refcast {

// Sorted sample of realized growth values (%), the distributional forecast
// a reference class provides.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> outcomes);

    std::size_t n() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

private:
    std::vector<double> values_;  // ascending
};

// Empirical CDF at `realized`: share of outcomes <= realized (weak
// inequality, so ties count).
double pit_evaluate(const EmpiricalDistribution& dist, double realized);

// Linear interpolation between order statistics at position level*(n-1).
double quantile(const EmpiricalDistribution& dist, double level);
// Same on any ascending range (no copy).
double quantile_sorted(std::span<const double> sorted, double level);

// Mean / sample standard deviation after dropping floor(alpha*n) values
// from each end of the sorted sample. alpha in [0, 0.5).
double trimmed_mean(std::span<const double> values, double alpha);
double trimmed_std(std::span<const double> values, double alpha);

// Bucketed CAGR distribution in the base-rate table layout: 5-point bins
// from -25 to 45 with open tails, left-open/right-closed.
struct BaseRateTable {
    static constexpr std::size_t kBuckets = 16;
    static const std::array<double, 15>& edges();
    static const std::array<std::string, kBuckets>& bucket_labels();

    std::array<double, kBuckets> share_pct{};  // sums to 100
    double trimmed_mean = 0;
    double median = 0;
    double trimmed_std = 0;
    double q025 = 0;
    double q975 = 0;
    double trim_alpha = 0.025;
    std::size_t n = 0;

    static std::size_t bucket_of(double value);
};

BaseRateTable base_rate_table(const EmpiricalDistribution& dist, double alpha = 0.025);

// Gaussian KDE with Silverman's rule-of-thumb bandwidth
// 0.9 * min(sd, IQR/1.34) * n^(-1/5), reflected at the lower support bound
// -100 so the density integrates to one over [-100, inf).
double silverman_bandwidth(const EmpiricalDistribution& dist);
std::vector<double> kde_density(const EmpiricalDistribution& dist, std::span<const double> grid);
// Convenience: evenly spaced grid from -100 (or min-3h if higher) to
// max+3h, then densities.
struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0;
};
DensityCurve kde_curve(const EmpiricalDistribution& dist, std::size_t points = 512);

// Maps analyst point estimates through the empirical CDF.
std::vector<std::pair<double, double>> place_estimates(const EmpiricalDistribution& dist,
                                                       std::span<const double> estimates);

}  // namespace refcast
