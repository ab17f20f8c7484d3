#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ohmstat {

struct SummaryStats {
    long n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double skewness_se = 0.0;
    double kurtosis_se = 0.0;
    double ks_statistic = 0.0;       // against the fitted normal
    double bootstrap_p_value = 1.0;  // parametric bootstrap of the KS statistic
    double variance_per_volume = 0.0;
};

double normal_cdf(double x);

// Moments only; KS and p-value filled by summarize_full.
SummaryStats summarize(const std::vector<double>& xs);

// Moments + Lilliefors KS statistic + parametric bootstrap p-value.
// volume scales variance_per_volume = variance / volume.
SummaryStats summarize_full(const std::vector<double>& xs, double volume, int bootstrap,
                            std::uint64_t seed);

// KS distance between the standardized sample and the standard normal.
double ks_vs_fitted_normal(const std::vector<double>& xs);

// Standard normal draws from the project mixer (platform-independent).
std::vector<double> standard_normal_sample(long n, std::uint64_t seed);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct VarianceScalingFit {
    bool ok = false;
    std::string note;
    std::vector<int> sides;
    std::vector<double> variances;
    std::vector<double> variance_per_volume;
    double slope = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    double last_ratio_change = 0.0;  // relative change of Var/L^d between the two largest sides
};

// log Var against log L across sides, with a percentile bootstrap CI for
// the slope. Needs >= 3 distinct sides; zero variances refuse the fit.
VarianceScalingFit variance_scaling(const std::vector<int>& sides,
                                    const std::vector<std::vector<double>>& values_per_side,
                                    int dimension, int bootstrap, std::uint64_t seed);

} // namespace ohmstat
