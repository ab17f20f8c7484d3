#include "ohmstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ohmstat/rng.hpp"

namespace ohmstat {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

SummaryStats summarize(const std::vector<double>& xs) {
    SummaryStats s;
    s.n = static_cast<long>(xs.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= s.n;
    m3 /= s.n;
    m4 /= s.n;
    s.variance = s.n > 1 ? m2 * s.n / (s.n - 1.0) : 0.0;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    const double n = static_cast<double>(s.n);
    if (s.n > 5) {
        s.skewness_se = std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
        s.kurtosis_se =
            2.0 * s.skewness_se * std::sqrt((n * n - 1.0) / ((n - 3.0) * (n + 5.0)));
    }
    return s;
}

double ks_vs_fitted_normal(const std::vector<double>& xs) {
    const SummaryStats s = summarize(xs);
    const double sd = std::sqrt(s.variance);
    if (sd == 0.0) return 1.0;
    std::vector<double> z(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - s.mean) / sd;
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

std::vector<double> standard_normal_sample(long n, std::uint64_t seed) {
    // Box-Muller on the project mixer, platform-independent sequence.
    std::vector<double> out(n);
    for (long i = 0; i < n; i += 2) {
        const double u1 = std::max(u01(mix(seed, 2 * i)), 1e-300);
        const double u2 = u01(mix(seed, 2 * i + 1));
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = r * std::cos(2.0 * M_PI * u2);
        if (i + 1 < n) out[i + 1] = r * std::sin(2.0 * M_PI * u2);
    }
    return out;
}

SummaryStats summarize_full(const std::vector<double>& xs, double volume, int bootstrap,
                            std::uint64_t seed) {
    SummaryStats s = summarize(xs);
    s.variance_per_volume = volume > 0.0 ? s.variance / volume : 0.0;
    s.ks_statistic = ks_vs_fitted_normal(xs);
    // Parametric bootstrap: the null distribution of the Lilliefors
    // statistic (parameters re-fitted per resample).
    long geq = 0;
    for (int b = 0; b < bootstrap; ++b) {
        const std::vector<double> sample = standard_normal_sample(s.n, mix(seed, b));
        if (ks_vs_fitted_normal(sample) >= s.ks_statistic) ++geq;
    }
    s.bootstrap_p_value = bootstrap > 0 ? (1.0 + geq) / (bootstrap + 1.0) : 1.0;
    return s;
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("linear_fit: need matching arrays of size >= 2");
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    LinearFit fit;
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

namespace {

double sample_variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double m2 = 0.0;
    for (double x : xs) m2 += (x - mean) * (x - mean);
    return m2 / (static_cast<double>(xs.size()) - 1.0);
}

} // namespace

VarianceScalingFit variance_scaling(const std::vector<int>& sides,
                                    const std::vector<std::vector<double>>& values_per_side,
                                    int dimension, int bootstrap, std::uint64_t seed) {
    VarianceScalingFit fit;
    fit.sides = sides;
    if (sides.size() < 3) {
        fit.note = "need at least 3 distinct sides";
        return fit;
    }
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const double var = sample_variance(values_per_side[i]);
        fit.variances.push_back(var);
        fit.variance_per_volume.push_back(var / std::pow(sides[i], dimension));
        if (var <= 0.0) {
            fit.note = "zero variance at side " + std::to_string(sides[i]) + ", fit refused";
            return fit;
        }
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        lx.push_back(std::log(static_cast<double>(sides[i])));
        ly.push_back(std::log(fit.variances[i]));
    }
    const LinearFit line = linear_fit(lx, ly);
    fit.slope = line.slope;

    // Percentile bootstrap over per-side resamples.
    std::vector<double> slopes;
    slopes.reserve(bootstrap);
    for (int b = 0; b < bootstrap; ++b) {
        std::vector<double> lyb(sides.size());
        bool ok = true;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            const auto& vals = values_per_side[i];
            std::vector<double> resample(vals.size());
            for (std::size_t j = 0; j < vals.size(); ++j) {
                const std::uint64_t r = mix(seed, (b * sides.size() + i) * 1000003ull + j);
                resample[j] = vals[r % vals.size()];
            }
            const double var = sample_variance(resample);
            if (var <= 0.0) {
                ok = false;
                break;
            }
            lyb[i] = std::log(var);
        }
        if (ok) slopes.push_back(linear_fit(lx, lyb).slope);
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        fit.slope_ci_lo = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
        fit.slope_ci_hi = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
    }

    const std::size_t last = sides.size() - 1;
    fit.last_ratio_change = std::abs(fit.variance_per_volume[last] /
                                         fit.variance_per_volume[last - 1] -
                                     1.0);
    fit.ok = true;
    return fit;
}

} // namespace ohmstat
