#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace qkt {

struct LinearFit {
    double slope = 0, intercept = 0;
    double slope_stderr = 0, intercept_stderr = 0;
};
/// ordinary least squares y = a x + b with residual-based standard errors
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// slope of y = f x through the origin, with shot-noise-free stderr
struct OriginFit {
    double slope = 0, stderr_slope = 0;
};
OriginFit origin_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ExpDecayFit {
    double amplitude = 1.0, rate = 1.0;  // y = amplitude * rate^m
    double rate_stderr = 0.0;
    bool ok = false;
};
/// least-squares fit of y = A f^m over integer-like depths; deterministic
/// scan plus golden refinement, tolerant of negative y values
ExpDecayFit fit_exp_decay(const std::vector<double>& m, const std::vector<double>& y,
                          const std::vector<double>& y_stderr = {});

/// two-sided Kolmogorov-Smirnov test against an analytic CDF
struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KSResult ks_test(std::vector<double> samples, double (*cdf)(double));

/// survival function of the Kolmogorov distribution (asymptotic, with the
/// Stephens small-sample correction applied by ks_test)
double kolmogorov_sf(double x);

/// CDF of the Porter-Thomas density (D-1)(1-p)^(D-2) on [0,1], D = 9
double porter_thomas_cdf(double p);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

/// jackknife standard error of a statistic over leave-one-out resamples
template <typename F>
double jackknife_stderr(std::size_t n, F&& stat) {
    if (n < 2) return 0.0;
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) loo[i] = stat(i);
    double m = 0.0;
    for (double v : loo) m += v;
    m /= static_cast<double>(n);
    double s = 0.0;
    for (double v : loo) s += (v - m) * (v - m);
    return std::sqrt(s * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace qkt
