#include "qkt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkt {

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - f.slope * x[i] - f.intercept;
            ss += r * r;
        }
        const double s2 = ss / static_cast<double>(n - 2);
        f.slope_stderr = std::sqrt(s2 / sxx);
        f.intercept_stderr = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    }
    return f;
}

OriginFit origin_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 1) throw std::invalid_argument("origin_fit: size mismatch");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    OriginFit f;
    f.slope = sxy / sxx;
    if (n > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - f.slope * x[i];
            ss += r * r;
        }
        f.stderr_slope = std::sqrt(ss / static_cast<double>(n - 1) / sxx);
    }
    return f;
}

namespace {

double sse_for_rate(const std::vector<double>& m, const std::vector<double>& y,
                    const std::vector<double>& w, double f, double* amp_out) {
    // optimal A for fixed f in the weighted least squares sense
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double fm = std::pow(f, m[i]);
        num += w[i] * y[i] * fm;
        den += w[i] * fm * fm;
    }
    const double a = (den > 0) ? num / den : 0.0;
    if (amp_out) *amp_out = a;
    double sse = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double r = y[i] - a * std::pow(f, m[i]);
        sse += w[i] * r * r;
    }
    return sse;
}

}  // namespace

ExpDecayFit fit_exp_decay(const std::vector<double>& m, const std::vector<double>& y,
                          const std::vector<double>& y_stderr) {
    if (m.size() != y.size() || m.size() < 2)
        throw std::invalid_argument("fit_exp_decay: need >= 2 points");
    std::vector<double> w(m.size(), 1.0);
    if (!y_stderr.empty()) {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (y_stderr[i] > 0) w[i] = 1.0 / (y_stderr[i] * y_stderr[i]);
    }
    ExpDecayFit out;
    // coarse deterministic scan over f, then golden-section refinement
    double best_f = 0.0, best_sse = std::numeric_limits<double>::infinity();
    for (double f = 1.05; f >= -1.0 - 1e-12; f -= 1e-3) {
        const double sse = sse_for_rate(m, y, w, f, nullptr);
        if (sse < best_sse) {
            best_sse = sse;
            best_f = f;
        }
    }
    auto refine = [&](double center) {
        double lo = center - 2e-3, hi = center + 2e-3;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 80; ++it) {
            const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            if (sse_for_rate(m, y, w, x1, nullptr) < sse_for_rate(m, y, w, x2, nullptr))
                hi = x2;
            else
                lo = x1;
        }
        return 0.5 * (lo + hi);
    };
    out.rate = refine(best_f);
    // even-only depth sets cannot distinguish +-f; prefer the positive branch
    if (out.rate < 0.0) {
        double scale = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) scale += w[i] * y[i] * y[i];
        const double mirrored = refine(-out.rate);
        const double sse_neg = sse_for_rate(m, y, w, out.rate, nullptr);
        const double sse_pos = sse_for_rate(m, y, w, mirrored, nullptr);
        if (sse_pos <= sse_neg + 1e-9 * scale) out.rate = mirrored;
    }
    const double sse = sse_for_rate(m, y, w, out.rate, &out.amplitude);
    out.ok = std::isfinite(out.rate) && std::isfinite(out.amplitude);

    // stderr via the local curvature of the weighted SSE in f
    if (m.size() > 2) {
        const double h = 1e-4;
        const double s0 = sse;
        const double sp = sse_for_rate(m, y, w, out.rate + h, nullptr);
        const double sm = sse_for_rate(m, y, w, out.rate - h, nullptr);
        const double curv = (sp - 2 * s0 + sm) / (h * h);
        const double dof = static_cast<double>(m.size()) - 2.0;
        if (curv > 0 && dof > 0) out.rate_stderr = std::sqrt(2.0 * (s0 / dof) / curv);
    }
    return out;
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // Jacobi-theta form, accurate at small x
        const double t = std::exp(-3.14159265358979323846 * 3.14159265358979323846 /
                                  (8.0 * x * x));
        const double sum = t + std::pow(t, 9) + std::pow(t, 25) + std::pow(t, 49);
        return 1.0 - std::sqrt(2.0 * 3.14159265358979323846) / x * sum;
    }
    const double u = std::exp(-2.0 * x * x);
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::pow(u, k * k);
        s += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::max(0.0, s);
}

KSResult ks_test(std::vector<double> samples, double (*cdf)(double)) {
    if (samples.size() < 5) throw std::invalid_argument("ks_test: too few samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = cdf(samples[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    KSResult r;
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

double porter_thomas_cdf(double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return 1.0 - std::pow(1.0 - p, 8);  // D = 9
}

}  // namespace qkt
