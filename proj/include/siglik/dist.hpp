// Distribution families: parameter records, pmf/density, cdf, moments.
// All combinatorial quantities are assembled in log space and
// exponentiated last; discrete cdfs sum from the nearer tail so small
// tail probabilities keep their relative accuracy.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "siglik/special.hpp"

namespace siglik {

struct Hypergeometric {
    std::int64_t population;  // N
    std::int64_t draws;       // n
    std::int64_t successes;   // r

    Hypergeometric(std::int64_t N, std::int64_t n, std::int64_t r)
        : population(N), draws(n), successes(r) {
        if (N < 0 || n < 0 || n > N || r < 0 || r > N) {
            throw std::domain_error("Hypergeometric: require 0 <= n <= N and 0 <= r <= N");
        }
    }
    std::int64_t support_min() const { return std::max<std::int64_t>(0, draws + successes - population); }
    std::int64_t support_max() const { return std::min(draws, successes); }
    double mean() const {
        return static_cast<double>(draws) * static_cast<double>(successes) /
               static_cast<double>(population);
    }
    double variance() const {
        double N = static_cast<double>(population);
        double n = static_cast<double>(draws);
        double r = static_cast<double>(successes);
        return n * r * (N - r) * (N - n) / (N * N * (N - 1.0));
    }
};

struct Binomial {
    std::int64_t trials;  // n
    double p;

    Binomial(std::int64_t n, double p_) : trials(n), p(p_) {
        if (n < 1) throw std::domain_error("Binomial: trials must be >= 1");
        if (!(p_ >= 0.0 && p_ <= 1.0)) throw std::domain_error("Binomial: p must lie in [0,1]");
    }
    double mean() const { return static_cast<double>(trials) * p; }
    double variance() const { return static_cast<double>(trials) * p * (1.0 - p); }
};

struct Poisson {
    double lambda;

    explicit Poisson(double lambda_) : lambda(lambda_) {
        if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
            throw std::domain_error("Poisson: lambda must be finite and >= 0");
        }
    }
    double mean() const { return lambda; }
    double variance() const { return lambda; }
};

// Number of failures before the ell-th success; ell may be any positive real.
struct NegBinomial {
    double p;
    double ell;

    NegBinomial(double p_, double ell_) : p(p_), ell(ell_) {
        if (!(p_ > 0.0 && p_ <= 1.0)) throw std::domain_error("NegBinomial: p must lie in (0,1]");
        if (!(ell_ > 0.0) || !std::isfinite(ell_)) {
            throw std::domain_error("NegBinomial: ell must be finite and positive");
        }
    }
    double mean() const { return ell * (1.0 - p) / p; }
    double variance() const { return ell * (1.0 - p) / (p * p); }
};

// Gamma distribution parameterized by shape and mean.
struct GammaDist {
    double alpha;
    double mean_value;

    GammaDist(double alpha_, double mean_) : alpha(alpha_), mean_value(mean_) {
        if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
            throw std::domain_error("GammaDist: shape must be finite and positive");
        }
        if (!(mean_ > 0.0) || !std::isfinite(mean_)) {
            throw std::domain_error("GammaDist: mean must be finite and positive");
        }
    }
    double scale() const { return mean_value / alpha; }
    double mean() const { return mean_value; }
    double variance() const { return mean_value * mean_value / alpha; }
};

struct InverseGaussian {
    double mu;
    double lambda;

    InverseGaussian(double mu_, double lambda_) : mu(mu_), lambda(lambda_) {
        if (!(mu_ > 0.0) || !std::isfinite(mu_)) {
            throw std::domain_error("InverseGaussian: mu must be finite and positive");
        }
        if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
            throw std::domain_error("InverseGaussian: lambda must be finite and positive");
        }
    }
    double mean() const { return mu; }
    double variance() const { return mu * mu * mu / lambda; }
};

// Sum of independent Bernoulli variables with individual success
// probabilities.
struct PoissonBinomial {
    std::vector<double> probs;

    explicit PoissonBinomial(std::vector<double> probs_) : probs(std::move(probs_)) {
        if (probs.empty()) throw std::domain_error("PoissonBinomial: needs at least one probability");
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
                throw std::domain_error("PoissonBinomial: probability " + std::to_string(i) +
                                        " outside [0,1]");
            }
        }
    }
    std::int64_t support_max() const { return static_cast<std::int64_t>(probs.size()); }
    double mean() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }
    double variance() const {
        double s = 0.0;
        for (double p : probs) s += p * (1.0 - p);
        return s;
    }
};

using DistSpec = std::variant<Hypergeometric, Binomial, Poisson, NegBinomial, GammaDist,
                              InverseGaussian, PoissonBinomial>;

// ---------------------------------------------------------------------------
// pmf / density

inline double log_pmf(const Hypergeometric& d, std::int64_t x) {
    return log_binomial(d.successes, x) + log_binomial(d.population - d.successes, d.draws - x) -
           log_binomial(d.population, d.draws);
}

inline double pmf(const Hypergeometric& d, std::int64_t x) {
    if (x < 0) throw std::domain_error("pmf: hypergeometric point must be >= 0");
    if (x < d.support_min() || x > d.support_max()) return 0.0;
    return std::exp(log_pmf(d, x));
}

inline double log_pmf(const Binomial& d, std::int64_t k) {
    double n = static_cast<double>(d.trials);
    double kk = static_cast<double>(k);
    if (d.p == 0.0) return k == 0 ? 0.0 : -inf;
    if (d.p == 1.0) return k == d.trials ? 0.0 : -inf;
    return log_binomial(d.trials, k) + kk * std::log(d.p) + (n - kk) * std::log1p(-d.p);
}

inline double pmf(const Binomial& d, std::int64_t k) {
    if (k < 0) throw std::domain_error("pmf: binomial point must be >= 0");
    if (k > d.trials) return 0.0;
    return std::exp(log_pmf(d, k));
}

inline double log_pmf(const Poisson& d, std::int64_t k) {
    if (d.lambda == 0.0) return k == 0 ? 0.0 : -inf;
    return static_cast<double>(k) * std::log(d.lambda) - d.lambda - log_factorial(k);
}

inline double pmf(const Poisson& d, std::int64_t k) {
    if (k < 0) throw std::domain_error("pmf: Poisson point must be >= 0");
    return std::exp(log_pmf(d, k));
}

inline double log_pmf(const NegBinomial& d, std::int64_t k) {
    if (d.p == 1.0) return k == 0 ? 0.0 : -inf;
    double kk = static_cast<double>(k);
    return std::lgamma(d.ell + kk) - std::lgamma(d.ell) - log_factorial(k) +
           d.ell * std::log(d.p) + kk * std::log1p(-d.p);
}

inline double pmf(const NegBinomial& d, std::int64_t k) {
    if (k < 0) throw std::domain_error("pmf: negative binomial point must be >= 0");
    return std::exp(log_pmf(d, k));
}

inline double pdf(const GammaDist& d, double x) {
    if (!(x > 0.0)) throw std::domain_error("pdf: Gamma density needs x > 0");
    double theta = d.scale();
    return std::exp((d.alpha - 1.0) * std::log(x) - x / theta - std::lgamma(d.alpha) -
                    d.alpha * std::log(theta));
}

inline double pdf(const InverseGaussian& d, double x) {
    if (!(x > 0.0)) throw std::domain_error("pdf: inverse Gaussian density needs x > 0");
    return std::sqrt(d.lambda / (tau * x * x * x)) *
           std::exp(-d.lambda * (x - d.mu) * (x - d.mu) / (2.0 * d.mu * d.mu * x));
}

// Full pmf vector of a Bernoulli sum by the O(n^2) convolution recurrence.
inline std::vector<double> pmf_vector(const PoissonBinomial& d) {
    std::vector<double> q{1.0};
    q.reserve(d.probs.size() + 1);
    for (double p : d.probs) {
        q.push_back(0.0);
        for (std::size_t j = q.size() - 1; j > 0; --j) {
            q[j] = q[j] * (1.0 - p) + q[j - 1] * p;
        }
        q[0] *= 1.0 - p;
    }
    return q;
}

inline double pmf(const PoissonBinomial& d, std::int64_t x) {
    if (x < 0) throw std::domain_error("pmf: Bernoulli-sum point must be >= 0");
    if (x > d.support_max()) return 0.0;
    return pmf_vector(d)[static_cast<std::size_t>(x)];
}

// ---------------------------------------------------------------------------
// cdf

inline double cdf(const Hypergeometric& d, std::int64_t x) {
    std::int64_t lo = d.support_min(), hi = d.support_max();
    if (x < lo) return 0.0;
    if (x >= hi) return 1.0;
    double N = static_cast<double>(d.population);
    double n = static_cast<double>(d.draws);
    double r = static_cast<double>(d.successes);
    if (static_cast<double>(x) < d.mean()) {
        double term = std::exp(log_pmf(d, lo));
        double acc = term;
        for (std::int64_t y = lo; y < x; ++y) {
            double yy = static_cast<double>(y);
            term *= (r - yy) * (n - yy) / ((yy + 1.0) * (N - r - n + yy + 1.0));
            acc += term;
        }
        return acc;
    }
    double term = std::exp(log_pmf(d, hi));
    double acc = term;
    for (std::int64_t y = hi; y > x + 1; --y) {
        double yy = static_cast<double>(y);
        term *= yy * (N - r - n + yy) / ((r - yy + 1.0) * (n - yy + 1.0));
        acc += term;
    }
    return 1.0 - acc;
}

inline double cdf(const Binomial& d, std::int64_t k) {
    if (k < 0) return 0.0;
    if (k >= d.trials) return 1.0;
    if (d.p == 0.0) return 1.0;
    if (d.p == 1.0) return 0.0;  // k < trials here
    double n = static_cast<double>(d.trials);
    double ratio = d.p / (1.0 - d.p);
    if (static_cast<double>(k) < d.mean()) {
        double term = std::exp(log_pmf(d, 0));
        double acc = term;
        for (std::int64_t j = 0; j < k; ++j) {
            double jj = static_cast<double>(j);
            term *= (n - jj) / (jj + 1.0) * ratio;
            acc += term;
        }
        return acc;
    }
    double term = std::exp(log_pmf(d, d.trials));
    double acc = term;
    for (std::int64_t j = d.trials; j > k + 1; --j) {
        double jj = static_cast<double>(j);
        term *= jj / (n - jj + 1.0) / ratio;
        acc += term;
    }
    return 1.0 - acc;
}

inline double cdf(const Poisson& d, std::int64_t k) {
    if (k < 0) return 0.0;
    if (d.lambda == 0.0) return 1.0;
    if (static_cast<double>(k) < d.lambda) {
        double term = std::exp(-d.lambda);
        double acc = term;
        for (std::int64_t j = 0; j < k; ++j) {
            term *= d.lambda / static_cast<double>(j + 1);
            acc += term;
        }
        return acc;
    }
    // Upper tail: terms decay monotonically once k >= lambda.
    double term = std::exp(log_pmf(d, k + 1));
    double acc = term;
    for (std::int64_t j = k + 2; j < k + 2 + 100000; ++j) {
        term *= d.lambda / static_cast<double>(j);
        acc += term;
        if (term < acc * 1e-20) break;
    }
    return 1.0 - acc;
}

inline double cdf(const NegBinomial& d, std::int64_t k) {
    if (k < 0) return 0.0;
    if (d.p == 1.0) return 1.0;
    if (static_cast<double>(k) < d.mean()) {
        double term = std::exp(d.ell * std::log(d.p));
        double acc = term;
        for (std::int64_t j = 0; j < k; ++j) {
            double jj = static_cast<double>(j);
            term *= (d.ell + jj) / (jj + 1.0) * (1.0 - d.p);
            acc += term;
        }
        return acc;
    }
    double term = std::exp(log_pmf(d, k + 1));
    double acc = term;
    for (std::int64_t j = k + 1; j < k + 1 + 1000000; ++j) {
        double jj = static_cast<double>(j);
        term *= (d.ell + jj) / (jj + 1.0) * (1.0 - d.p);
        acc += term;
        if (term < acc * 1e-20) break;
    }
    return 1.0 - acc;
}

inline double cdf(const GammaDist& d, double x) {
    if (x < 0.0) throw std::domain_error("cdf: Gamma point must be >= 0");
    if (x == 0.0) return 0.0;
    return regularized_gamma_p(d.alpha, x / d.scale());
}

inline double cdf(const InverseGaussian& d, double x) {
    if (x < 0.0) throw std::domain_error("cdf: inverse Gaussian point must be >= 0");
    if (x == 0.0) return 0.0;
    double s = std::sqrt(d.lambda / x);
    double a = s * (x / d.mu - 1.0);
    double b = s * (x / d.mu + 1.0);
    // The second term is evaluated in log space: exp(2*lambda/mu) on its
    // own overflows long before the product does.
    double second = std::exp(2.0 * d.lambda / d.mu + log_gaussian_cdf(-b));
    return gaussian_cdf(a) + second;
}

// ln cdf of the inverse Gaussian, stable deep in the lower tail.
inline double log_cdf(const InverseGaussian& d, double x) {
    if (!(x > 0.0)) return -inf;
    double s = std::sqrt(d.lambda / x);
    double a = s * (x / d.mu - 1.0);
    double b = s * (x / d.mu + 1.0);
    double la = log_gaussian_cdf(a);
    double lb = 2.0 * d.lambda / d.mu + log_gaussian_cdf(-b);
    double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

inline double cdf(const PoissonBinomial& d, std::int64_t x) {
    if (x < 0) return 0.0;
    if (x >= d.support_max()) return 1.0;
    std::vector<double> q = pmf_vector(d);
    double acc = 0.0;
    for (std::int64_t j = 0; j <= x; ++j) acc += q[static_cast<std::size_t>(j)];
    return std::min(acc, 1.0);
}

// ---------------------------------------------------------------------------
// Exponential tilt of a Bernoulli sum: shifts every root of the
// probability generating function by e^beta, which maps success
// probability p to e^beta p / (1 + (e^beta - 1) p).
inline std::vector<double> tilt_poisson_binomial(const std::vector<double>& probs, double beta) {
    if (!std::isfinite(beta)) throw std::domain_error("tilt_poisson_binomial: beta must be finite");
    std::vector<double> out(probs.size());
    double eb = std::exp(beta);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = probs[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::domain_error("tilt_poisson_binomial: probability outside [0,1]");
        }
        out[i] = eb * p / (1.0 + (eb - 1.0) * p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variant dispatch

inline bool is_discrete(const DistSpec& dist) {
    return !std::holds_alternative<GammaDist>(dist) &&
           !std::holds_alternative<InverseGaussian>(dist);
}

namespace detail {

inline std::int64_t require_integer_point(double x, const char* what) {
    if (x < 0.0) throw std::domain_error(std::string(what) + ": point must be >= 0");
    if (std::floor(x) != x) throw std::domain_error(std::string(what) + ": point must be an integer");
    return static_cast<std::int64_t>(x);
}

}  // namespace detail

inline double pmf(const DistSpec& dist, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist> || std::is_same_v<T, InverseGaussian>) {
                return pdf(d, x);
            } else {
                return pmf(d, detail::require_integer_point(x, "pmf"));
            }
        },
        dist);
}

inline double cdf(const DistSpec& dist, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist> || std::is_same_v<T, InverseGaussian>) {
                return cdf(d, x);
            } else {
                return cdf(d, detail::require_integer_point(x, "cdf"));
            }
        },
        dist);
}

inline double mean(const DistSpec& dist) {
    return std::visit([](const auto& d) { return d.mean(); }, dist);
}

inline double variance(const DistSpec& dist) {
    return std::visit([](const auto& d) { return d.variance(); }, dist);
}

inline std::string family_name(const DistSpec& dist) {
    struct Namer {
        std::string operator()(const Hypergeometric&) const { return "hypergeometric"; }
        std::string operator()(const Binomial&) const { return "binomial"; }
        std::string operator()(const Poisson&) const { return "poisson"; }
        std::string operator()(const NegBinomial&) const { return "negative-binomial"; }
        std::string operator()(const GammaDist&) const { return "gamma"; }
        std::string operator()(const InverseGaussian&) const { return "inverse-gaussian"; }
        std::string operator()(const PoissonBinomial&) const { return "poisson-binomial"; }
    };
    return std::visit(Namer{}, dist);
}

}  // namespace siglik
