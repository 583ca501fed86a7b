#pragma once

#include "refcast/panel.hpp"
#include "refcast/predictors.hpp"
#include "refcast/refclass.hpp"

#include <cstdint>
#include <vector>

namespace refcast::synth {

// Deterministic RNG used by the generator so panels are identical across
// platforms and standard-library versions (std distributions are not
// portable). Uniforms are the top 53 bits of a SplitMix64/xorshift mix;
// normals come from Box-Muller.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64();
    double uniform();               // [0, 1)
    double normal();                // standard normal
    int uniform_int(int lo, int hi);  // inclusive bounds

private:
    std::uint64_t state_;
};

// Piecewise-linear monotone mechanism g with end-slope extrapolation.
struct PiecewiseLinear {
    std::vector<double> xs;  // strictly increasing knot positions
    std::vector<double> ys;  // non-decreasing values

    double operator()(double x) const;
    void validate() const;
};

// Panel generator with a known one-year market mechanism:
//   growth%  =  g(X_{i,t}) + sigma(X_{i,t}) * eps,   eps ~ N(0,1),
//   sigma(x) =  sigma_base + sigma_vslope * |x - x_mean|,
// truncated below at -100. The generating predictor X (an AR(1) per firm)
// is written to the `beta` column; an independent noise predictor goes to
// `pe_ratio`. Sales follow the generated growth path, so the forward CAGR
// recovered from the panel equals the generated growth.
struct SynthSpec {
    int n_firms = 2000;
    int n_years = 50;
    int start_year = 1970;
    std::uint64_t seed = 7;

    // AR(1) predictor process.
    double x_mean = 0.0;
    double x_persistence = 0.6;
    double x_noise_sd = 0.8;

    PiecewiseLinear g{{-3.0, 0.0, 3.0}, {-9.0, 3.0, 15.0}};
    double sigma_base = 9.0;
    double sigma_vslope = 0.0;  // > 0 gives the v-shaped scale profile

    // Fraction of firm-years whose fundamentals beyond sales are blanked,
    // to exercise missing-data paths.
    double missing_rate = 0.0;

    void validate() const;
    double sigma(double x) const;
};

// The generating conditional distribution of one-year growth given the
// predictor; F(y | x) = Phi((y - g(x)) / sigma(x)) on [-100, inf).
struct TrueCdf {
    SynthSpec spec;
    double operator()(double x, double y) const;
};

struct SynthPanel {
    Panel panel;
    TrueCdf true_cdf;
};

// Deterministic for a given spec; throws DataError on degenerate specs.
SynthPanel generate_panel(const SynthSpec& spec);

// Literal transcription of the similarity rule for verification: re-sorts
// the pool, walks to the case's position and applies the two-sided take
// with the explicit top/bottom-fraction-c tail rule. Quadratic-ish and
// meant for tests only. Returns member positions into the (sorted) pool.
struct OracleResult {
    SkipReason skip = SkipReason::none;
    std::vector<std::size_t> members;
};
OracleResult oracle_class(const CandidatePool& pool, double case_x, const ClassParams& params);

}  // namespace refcast::synth
