// Signed log-likelihood (G-transform): per-family divergences, the
// Gaussian estimate Phi(G), and the derivative identities used to prove
// the sandwich inequalities.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "siglik/dist.hpp"
#include "siglik/special.hpp"

namespace siglik {

enum class Side { BelowMean, AtOrAboveMean };

struct SignedLL {
    double g = 0.0;           // signed log-likelihood, g^2 = 2 * divergence
    double divergence = 0.0;  // nats
    Side side = Side::AtOrAboveMean;
};

// KL divergence of Bernoulli(a) from Bernoulli(b), in nats.
inline double kl_bernoulli(double a, double b) {
    double t = 0.0;
    if (a > 0.0) t += a * std::log(a / b);
    if (a < 1.0) t += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return t;
}

// N*I of the 2x2 table [[x, r-x], [n-x, N-n-r+x]] with row margins
// (r, N-r) and column margins (n, N-n).
inline double two_by_two_mutual_nats(std::int64_t N, std::int64_t n, std::int64_t r,
                                     std::int64_t x) {
    auto f = [](std::int64_t v) { return xlnx(static_cast<double>(v)); };
    double ni = f(x) + f(r - x) + f(n - x) + f(N - n - r + x) - f(n) - f(N - n) - f(r) -
                f(N - r) + f(N);
    return ni > 0.0 ? ni : 0.0;
}

// ---------------------------------------------------------------------------
// Divergence of the fitted distribution at the observed point from the
// null, in nats. For the hypergeometric this is N*I of the induced 2x2
// table; the exponential families use their closed forms.

inline double divergence(const Hypergeometric& d, std::int64_t x) {
    if (x < d.support_min() || x > d.support_max()) {
        throw std::domain_error("divergence: point outside hypergeometric support");
    }
    return two_by_two_mutual_nats(d.population, d.draws, d.successes, x);
}

inline double divergence(const Binomial& d, std::int64_t x) {
    if (x < 0 || x > d.trials) throw std::domain_error("divergence: point outside binomial support");
    double n = static_cast<double>(d.trials);
    return n * kl_bernoulli(static_cast<double>(x) / n, d.p);
}

inline double divergence(const Poisson& d, std::int64_t x) {
    if (x < 0) throw std::domain_error("divergence: point outside Poisson support");
    double xx = static_cast<double>(x);
    return (xx > 0.0 ? xx * std::log(xx / d.lambda) : 0.0) - xx + d.lambda;
}

inline double divergence(const NegBinomial& d, std::int64_t k) {
    if (k < 0) throw std::domain_error("divergence: point outside negative binomial support");
    double kk = static_cast<double>(k);
    double p_hat = d.ell / (kk + d.ell);
    return (kk + d.ell) * kl_bernoulli(p_hat, d.p);
}

inline double divergence(const GammaDist& d, double x) {
    if (!(x > 0.0)) throw std::domain_error("divergence: Gamma point must be > 0");
    double ratio = x / d.mean_value;
    return d.alpha * (ratio - 1.0 - std::log(ratio));
}

inline double divergence(const InverseGaussian& d, double x) {
    if (!(x > 0.0)) throw std::domain_error("divergence: inverse Gaussian point must be > 0");
    double diff = x - d.mu;
    return d.lambda * diff * diff / (2.0 * x * d.mu * d.mu);
}

inline double divergence(const DistSpec& dist, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist> || std::is_same_v<T, InverseGaussian>) {
                return divergence(d, x);
            } else if constexpr (std::is_same_v<T, PoissonBinomial>) {
                throw std::domain_error("divergence: not defined for Bernoulli sums");
            } else {
                return divergence(d, detail::require_integer_point(x, "divergence"));
            }
        },
        dist);
}

// ---------------------------------------------------------------------------
// G-transform: -sqrt(2D) strictly below the null mean, +sqrt(2D) at or
// above it.

inline SignedLL signed_ll(const DistSpec& dist, double x) {
    double div = divergence(dist, x);
    double m = mean(dist);
    SignedLL out;
    out.divergence = div;
    if (x < m) {
        out.side = Side::BelowMean;
        out.g = -std::sqrt(2.0 * div);
    } else {
        out.side = Side::AtOrAboveMean;
        out.g = std::sqrt(2.0 * div);
    }
    return out;
}

// Gaussian estimate Phi(G(x)) of the cdf at x.
inline double phi_g(const DistSpec& dist, double x) {
    return gaussian_cdf(signed_ll(dist, x).g);
}

// ---------------------------------------------------------------------------
// d/dmu0 Phi(G) = phi(G)/V(mu0) * (mu0 - mu)/G for the mean-parameterized
// exponential families; at G = 0 the limit is -phi(0)/sqrt(V(mu0)).

namespace detail {

struct VarianceFunction {
    double mu0;
    double v;
};

inline VarianceFunction variance_function(const DistSpec& dist) {
    struct Visitor {
        VarianceFunction operator()(const Binomial& d) const {
            double mu0 = d.mean();
            return {mu0, mu0 * (1.0 - mu0 / static_cast<double>(d.trials))};
        }
        VarianceFunction operator()(const Poisson& d) const { return {d.lambda, d.lambda}; }
        VarianceFunction operator()(const NegBinomial& d) const {
            double mu0 = d.mean();
            return {mu0, mu0 * (1.0 + mu0 / d.ell)};
        }
        VarianceFunction operator()(const GammaDist& d) const {
            return {d.mean_value, d.mean_value * d.mean_value / d.alpha};
        }
        VarianceFunction operator()(const InverseGaussian& d) const {
            return {d.mu, d.mu * d.mu * d.mu / d.lambda};
        }
        VarianceFunction operator()(const Hypergeometric&) const {
            throw std::domain_error("phi_g_mu0_derivative: hypergeometric is not an exponential family");
        }
        VarianceFunction operator()(const PoissonBinomial&) const {
            throw std::domain_error("phi_g_mu0_derivative: Bernoulli sums are not supported");
        }
    };
    return std::visit(Visitor{}, dist);
}

}  // namespace detail

inline double phi_g_mu0_derivative(const DistSpec& dist, double x) {
    auto [mu0, v] = detail::variance_function(dist);
    SignedLL s = signed_ll(dist, x);
    if (s.g == 0.0) {
        return -gaussian_pdf(0.0) / std::sqrt(v);
    }
    return gaussian_pdf(s.g) / v * (mu0 - x) / s.g;
}

// d/dmu Pr(W1 = k) for W1 ~ nb(p, ell) with mu = ell(1-p)/p equals
// Pr(W2 = k-1) - Pr(W2 = k) where W2 ~ nb(p, ell+1).
inline double negbin_pmf_mu_derivative(double p, double ell, std::int64_t k) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("negbin_pmf_mu_derivative: p must lie strictly in (0,1)");
    }
    if (!(ell > 0.0)) throw std::domain_error("negbin_pmf_mu_derivative: ell must be positive");
    if (k < 0) throw std::domain_error("negbin_pmf_mu_derivative: k must be >= 0");
    NegBinomial shifted(p, ell + 1.0);
    double at_k = pmf(shifted, k);
    double at_km1 = k == 0 ? 0.0 : pmf(shifted, k - 1);
    return at_km1 - at_k;
}

}  // namespace siglik
