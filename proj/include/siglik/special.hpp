// Numeric kernels: log-factorials, Gaussian cdf/quantile, regularized
// incomplete gamma, chi-square quantiles. Everything here is a pure
// function of its arguments; the only cache is an immutable table built
// on first use.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace siglik {

inline constexpr double tau = 6.283185307179586476925286766559;  // 2*pi

inline constexpr double inf = std::numeric_limits<double>::infinity();

// x*ln(x) with the 0*ln(0) = 0 convention used by all entropy sums.
inline double xlnx(double x) {
    return x > 0.0 ? x * std::log(x) : 0.0;
}

namespace detail {

// Log-factorials up to kMaxTabulated, each evaluated independently in
// extended precision. Past the table we fall back to lgammal.
inline constexpr std::size_t kMaxTabulated = 4096;

inline const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kMaxTabulated + 1);
        for (std::size_t i = 0; i <= kMaxTabulated; ++i) {
            t[i] = static_cast<double>(std::lgamma(static_cast<long double>(i) + 1.0L));
        }
        return t;
    }();
    return table;
}

}  // namespace detail

// ln(n!)
inline double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    if (static_cast<std::uint64_t>(n) <= detail::kMaxTabulated) {
        return detail::log_factorial_table()[static_cast<std::size_t>(n)];
    }
    return static_cast<double>(std::lgamma(static_cast<long double>(n) + 1.0L));
}

// ln C(n, k)
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) {
        throw std::domain_error("log_binomial: require 0 <= k <= n, got n=" +
                                std::to_string(n) + " k=" + std::to_string(k));
    }
    if (k == 0 || k == n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Standard Gaussian density.
inline double gaussian_pdf(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(tau);
}

// Phi(t) through erfc so tail values keep relative accuracy.
inline double gaussian_cdf(double t) {
    return 0.5 * std::erfc(-t / std::numbers::sqrt2_v<double>);
}

// ln Phi(t), usable far beyond the range where Phi underflows.
inline double log_gaussian_cdf(double t) {
    if (t > -37.0) {
        double v = gaussian_cdf(t);
        if (v > 0.5) return std::log1p(-gaussian_cdf(-t));
        return std::log(v);
    }
    // Asymptotic expansion of the Mills ratio.
    const double t2 = t * t;
    double series = -1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2) +
                    105.0 / (t2 * t2 * t2 * t2) - 945.0 / (t2 * t2 * t2 * t2 * t2);
    return -0.5 * t2 - std::log(-t) - 0.5 * std::log(tau) + std::log1p(series);
}

// Phi^-1(u). Acklam's rational approximation polished by one Newton step.
inline double gaussian_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("gaussian_quantile: u must lie in (0,1)");
    }
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (u < p_low) {
        double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        double q = u - 0.5;
        double s = q * q;
        x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * q /
            (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double err = gaussian_cdf(x) - u;
    x -= err / gaussian_pdf(x);
    return x;
}

namespace detail {

// Lower regularized incomplete gamma by its power series; accurate
// relative to P itself.
inline double gamma_p_series(double a, double x, double* log_out = nullptr) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    double log_p = std::log(sum) + a * std::log(x) - x - std::lgamma(a);
    if (log_out) *log_out = log_p;
    return std::exp(log_p);
}

// Upper regularized incomplete gamma by Lentz's continued fraction.
inline double gamma_q_cf(double a, double x, double* log_out = nullptr) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double log_q = std::log(h) + a * std::log(x) - x - std::lgamma(a);
    if (log_out) *log_out = log_q;
    return std::exp(log_q);
}

}  // namespace detail

// P(a, x): lower regularized incomplete gamma.
inline double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

// Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// ln P(a, x), keeping relative accuracy deep in the lower tail.
inline double log_regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("log_regularized_gamma_p: bad arguments");
    if (x == 0.0) return -inf;
    if (x < a + 1.0) {
        double lg;
        detail::gamma_p_series(a, x, &lg);
        return lg;
    }
    return std::log1p(-detail::gamma_q_cf(a, x));
}

// ln Q(a, x), keeping relative accuracy deep in the upper tail.
inline double log_regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("log_regularized_gamma_q: bad arguments");
    if (x == 0.0) return 0.0;
    if (x >= a + 1.0) {
        double lg;
        detail::gamma_q_cf(a, x, &lg);
        return lg;
    }
    return std::log1p(-detail::gamma_p_series(a, x));
}

// Inverse of P(a, .) at probability u. Wilson-Hilferty start, then
// safeguarded Newton.
inline double gamma_p_inverse(double a, double u) {
    if (a <= 0.0) throw std::domain_error("gamma_p_inverse: shape must be positive");
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("gamma_p_inverse: u must lie in (0,1)");

    double x;
    if (a > 0.5) {
        double g = gaussian_quantile(u);
        double t = 1.0 - 1.0 / (9.0 * a) + g / (3.0 * std::sqrt(a));
        x = a * t * t * t;
        if (x <= 0.0) x = 1e-8;
    } else {
        // Small-shape start from the leading term of the series.
        x = std::exp((std::log(u) + std::lgamma(a + 1.0)) / a);
        if (!(x > 0.0) || !std::isfinite(x)) x = 1e-8;
    }

    double lo = 0.0, hi = inf;
    for (int it = 0; it < 200; ++it) {
        double f = regularized_gamma_p(a, x) - u;
        if (f > 0.0) hi = x; else lo = x;
        double dens = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
        double step = dens > 0.0 ? f / dens : 0.0;
        double next = x - step;
        if (!(next > lo && (next < hi))) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : x * 2.0;
        }
        if (std::fabs(next - x) <= 1e-15 * x) { x = next; break; }
        x = next;
    }
    return x;
}

// Chi-square distribution with df degrees of freedom.
inline double chi2_cdf(std::int64_t df, double x) {
    if (df < 1) throw std::domain_error("chi2_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * static_cast<double>(df), 0.5 * x);
}

inline double chi2_quantile(std::int64_t df, double u) {
    if (df < 1) throw std::domain_error("chi2_quantile: df must be >= 1");
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("chi2_quantile: u must lie in (0,1)");
    return 2.0 * gamma_p_inverse(0.5 * static_cast<double>(df), u);
}

}  // namespace siglik
