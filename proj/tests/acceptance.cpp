// Acceptance suite: runs every top-level criterion at its stated
// tolerance and prints one pass/fail line each. Exit status is the
// number of failed criteria. `--full` widens the two sweep criteria to
// their full published ranges (sample size 200 exhaustive, 2270 pruned).
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "siglik/siglik.hpp"

using namespace siglik;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Enumerate all k*l tables with every cell >= 1 and total <= max_total.
void for_each_occupied_table(std::size_t cells, std::int64_t max_total,
                             const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    std::vector<std::int64_t> v(cells, 1);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t at, std::int64_t used) {
        if (at == cells) {
            fn(v);
            return;
        }
        std::int64_t remaining_min = static_cast<std::int64_t>(cells - at - 1);
        for (std::int64_t c = 1; used + c + remaining_min <= max_total; ++c) {
            v[at] = c;
            rec(at + 1, used + c);
        }
    };
    rec(0, 0);
}

}  // namespace

// 1. The fourteen interior step abscissae of the (40,15,15) reference
// case within 1e-6, the endpoints within 0.01.
void criterion_fig3() {
    static const double interior[14] = {-3.3586706055, -2.5548926947, -1.8153892123,
                                        -1.1095557208, -0.4231437738, 0.2525852384,
                                        0.924060006,   1.596776096,   2.2761178875,
                                        2.9680823484,  3.6802323215,  4.4234304316,
                                        5.2159712851,  6.0975364584};
    DistSpec h = Hypergeometric(40, 15, 15);
    bool pass = true;
    double worst = 0.0;
    for (int x = 1; x <= 14; ++x) {
        double g = signed_ll(h, static_cast<double>(x)).g;
        double err = std::fabs(g - interior[x - 1]);
        worst = std::max(worst, err);
        pass = pass && err <= 1e-6;
    }
    double g0 = signed_ll(h, 0.0).g;
    double g15 = signed_ll(h, 15.0).g;
    pass = pass && std::fabs(g0 - (-4.39)) <= 0.01 && std::fabs(g15 - 7.27) <= 0.01;
    char buf[128];
    std::snprintf(buf, sizeof buf, "max interior error %.2e, endpoints %.4f / %.4f", worst, g0,
                  g15);
    report(1, "step-abscissae-regression", pass, buf);
}

// 2. Exhaustive sweep: zero violations and zero near-ties at eps=1e-12.
void criterion_exhaustive(std::int64_t n_max) {
    VerificationConfig cfg;
    cfg.tie_epsilon = 1e-12;
    VerificationReport r = verify_hypergeometric_exhaustive(n_max, cfg);
    bool pass = r.violations.empty() && r.near_ties.empty();
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "n_max=%lld: %llu cases, %zu violations, %zu near-ties, %.2fs",
                  static_cast<long long>(n_max),
                  static_cast<unsigned long long>(r.cases_checked), r.violations.size(),
                  r.near_ties.size(), r.elapsed_seconds);
    report(2, "exhaustive-verification", pass, buf);
}

// 3. Pruned sweep replica: zero violations.
void criterion_pruned(std::int64_t tot_max) {
    VerificationConfig cfg;
    cfg.tie_epsilon = 1e-12;
    cfg.tot_max = tot_max;
    VerificationReport r = verify_hypergeometric_pruned(cfg);
    bool pass = r.violations.empty() && r.near_ties.empty();
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "tot_max=%lld: %llu cases, %zu violations, %zu near-ties, %.2fs",
                  static_cast<long long>(tot_max),
                  static_cast<unsigned long long>(r.cases_checked), r.violations.size(),
                  r.near_ties.size(), r.elapsed_seconds);
    report(3, "pruned-verification", pass, buf);
}

// 4. The Poisson pruning constant.
void criterion_poisson_constant() {
    double v = cdf(Poisson(22.7), 9);
    bool pass = v <= 0.000974 && v > 0.0009;
    char buf[96];
    std::snprintf(buf, sizeof buf, "cdf(Poisson(22.7), 9) = %.9g", v);
    report(4, "poisson-pruning-constant", pass, buf);
}

// 5. Proved-theorem sweeps across the standard grids.
void criterion_family_sweeps() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (const char* fam :
         {"binomial", "poisson", "negative-binomial", "gamma", "inverse-gaussian"}) {
        VerificationConfig cfg;
        cfg.tie_epsilon = 1e-12;
        VerificationReport r = verify_family_grid(default_family_grid(fam), theorem_side(fam), cfg);
        pass = pass && r.violations.empty();
        detail += std::string(fam) + "=" + std::to_string(r.violations.size()) + " ";
    }
    char buf[192];
    std::snprintf(buf, sizeof buf, "violations: %s(%.1fs)", detail.c_str(), elapsed_since(t0));
    report(5, "family-theorem-sweeps", pass, buf);
}

// 6. The occupied-cell point probability bound on exhaustive small
// tables: all 2x2 and 2x3 with N <= 30, all 3x3 with N <= 18.
void criterion_bound_sweep() {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t cases = 0;
    bool pass = true;
    auto check = [&](std::size_t rows, std::size_t cols, const std::vector<std::int64_t>& cells) {
        std::vector<std::vector<std::int64_t>> m(rows, std::vector<std::int64_t>(cols));
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) m[i][j] = cells[i * cols + j];
        }
        ContingencyTable t(m);
        ++cases;
        if (point_probability(t) > point_probability_bound(t)) pass = false;
    };
    for_each_occupied_table(4, 30, [&](const std::vector<std::int64_t>& c) { check(2, 2, c); });
    for_each_occupied_table(6, 30, [&](const std::vector<std::int64_t>& c) { check(2, 3, c); });
    for_each_occupied_table(9, 18, [&](const std::vector<std::int64_t>& c) { check(3, 3, c); });
    char buf[96];
    std::snprintf(buf, sizeof buf, "%llu tables, %.1fs", static_cast<unsigned long long>(cases),
                  elapsed_since(t0));
    report(6, "point-probability-bound", pass, buf);
}

// 7. Derivative identities against central finite differences.
void criterion_derivatives() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double step = 1e-5;
    bool pass = true;
    double worst = 0.0;

    auto central = [&](const std::function<double(double)>& f, double at) {
        return (f(at + step) - f(at - step)) / (2.0 * step);
    };

    int done = 0;
    while (done < 100) {
        int family = static_cast<int>(rng() % 5);
        double exact = 0.0, fd = 0.0, g = 0.0;
        switch (family) {
            case 0: {  // binomial
                std::int64_t n = 3 + static_cast<std::int64_t>(rng() % 58);
                double p = 0.05 + 0.9 * unif(rng);
                std::int64_t x = static_cast<std::int64_t>(rng() % (n + 1));
                DistSpec d = Binomial(n, p);
                g = signed_ll(d, static_cast<double>(x)).g;
                if (std::fabs(g) < 0.05) continue;
                exact = phi_g_mu0_derivative(d, static_cast<double>(x));
                fd = central(
                    [&](double u) {
                        return phi_g(DistSpec(Binomial(n, u / static_cast<double>(n))),
                                     static_cast<double>(x));
                    },
                    static_cast<double>(n) * p);
                break;
            }
            case 1: {  // poisson
                double lambda = 0.5 + 39.5 * unif(rng);
                std::int64_t x =
                    static_cast<std::int64_t>(unif(rng) * (lambda + 8.0 * std::sqrt(lambda)));
                DistSpec d = Poisson(lambda);
                g = signed_ll(d, static_cast<double>(x)).g;
                if (std::fabs(g) < 0.05) continue;
                exact = phi_g_mu0_derivative(d, static_cast<double>(x));
                fd = central(
                    [&](double u) { return phi_g(DistSpec(Poisson(u)), static_cast<double>(x)); },
                    lambda);
                break;
            }
            case 2: {  // negative binomial
                double ell = 0.5 + 15.0 * unif(rng);
                double p = 0.1 + 0.8 * unif(rng);
                std::int64_t x = static_cast<std::int64_t>(rng() % 40);
                DistSpec d = NegBinomial(p, ell);
                g = signed_ll(d, static_cast<double>(x)).g;
                if (std::fabs(g) < 0.05) continue;
                exact = phi_g_mu0_derivative(d, static_cast<double>(x));
                fd = central(
                    [&](double u) {
                        return phi_g(DistSpec(NegBinomial(ell / (ell + u), ell)),
                                     static_cast<double>(x));
                    },
                    ell * (1.0 - p) / p);
                break;
            }
            case 3: {  // gamma
                double alpha = 0.3 + 15.0 * unif(rng);
                double mv = 0.2 + 8.0 * unif(rng);
                double x = mv * (0.05 + 3.0 * unif(rng));
                DistSpec d = GammaDist(alpha, mv);
                g = signed_ll(d, x).g;
                if (std::fabs(g) < 0.05) continue;
                exact = phi_g_mu0_derivative(d, x);
                fd = central([&](double u) { return phi_g(DistSpec(GammaDist(alpha, u)), x); }, mv);
                break;
            }
            default: {  // inverse gaussian
                double mu = 0.2 + 4.0 * unif(rng);
                double lambda = 0.2 + 5.0 * unif(rng);
                double x = mu * (0.05 + 3.0 * unif(rng));
                DistSpec d = InverseGaussian(mu, lambda);
                g = signed_ll(d, x).g;
                if (std::fabs(g) < 0.05) continue;
                exact = phi_g_mu0_derivative(d, x);
                fd = central(
                    [&](double u) { return phi_g(DistSpec(InverseGaussian(u, lambda)), x); }, mu);
                break;
            }
        }
        if (std::fabs(exact) < 1e-4) continue;  // difference quotient too noisy for a relative test
        double rel = std::fabs(fd - exact) / std::fabs(exact);
        worst = std::max(worst, rel);
        if (rel > 1e-6) pass = false;
        ++done;
    }

    // At the mean the documented limit value applies.
    double v = 10.0 * 0.3 * 0.7;
    if (std::fabs(phi_g_mu0_derivative(DistSpec(Binomial(10, 0.3)), 3.0) +
                  gaussian_pdf(0.0) / std::sqrt(v)) > 1e-14) {
        pass = false;
    }

    int done2 = 0;
    double worst2 = 0.0;
    while (done2 < 100) {
        double p = 0.1 + 0.8 * unif(rng);
        double ell = 0.5 + 10.0 * unif(rng);
        std::int64_t k = static_cast<std::int64_t>(rng() % 25);
        double exact = negbin_pmf_mu_derivative(p, ell, k);
        if (std::fabs(exact) < 1e-4) continue;
        double mu0 = ell * (1.0 - p) / p;
        double fd = central(
            [&](double u) { return pmf(NegBinomial(ell / (ell + u), ell), k); }, mu0);
        double rel = std::fabs(fd - exact) / std::fabs(exact);
        worst2 = std::max(worst2, rel);
        if (rel > 1e-6) pass = false;
        ++done2;
    }

    char buf[128];
    std::snprintf(buf, sizeof buf, "worst rel. diff %.2e (Phi(G)), %.2e (pmf)", worst, worst2);
    report(7, "derivative-lemmas", pass, buf);
}

// 8. Saddle-point exactness of the inverse Gaussian density.
void criterion_saddle_point() {
    bool pass = true;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        double mu = 0.1 * std::pow(100.0, i / 9.0);  // 0.1 .. 10 log spaced
        for (int j = 0; j < 10; ++j) {
            double lambda = 0.1 * std::pow(100.0, j / 9.0);
            InverseGaussian d(mu, lambda);
            for (int k = 0; k < 20; ++k) {
                double x = mu * 0.05 * std::pow(8.0 / 0.05, k / 19.0);
                double g = signed_ll(DistSpec(d), x).g;
                double rhs = gaussian_pdf(g) / std::sqrt(x * x * x / lambda);
                double lhs = pdf(d, x);
                double rel = std::fabs(lhs - rhs) / rhs;
                worst = std::max(worst, rel);
                if (rel > 1e-12) pass = false;
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "2000 grid points, worst rel. error %.2e", worst);
    report(8, "saddle-point-exactness", pass, buf);
}

// 9. Bernoulli-sum properties: normalization, the binomial collapse, the
// integer-mean median, and the tilt commutation.
void criterion_poisson_binomial() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool pass = true;

    for (int t = 0; t < 50; ++t) {
        int n = 1 + static_cast<int>(rng() % 60);
        std::vector<double> probs(n);
        for (auto& p : probs) p = unif(rng);
        auto v = pmf_vector(PoissonBinomial(probs));
        double sum = 0.0;
        for (double q : v) sum += q;
        if (std::fabs(sum - 1.0) > 1e-10) pass = false;
    }

    for (int n : {5, 20, 50}) {
        for (double p : {0.07, 0.5, 0.91}) {
            auto v = pmf_vector(PoissonBinomial(std::vector<double>(n, p)));
            Binomial b(n, p);
            for (std::int64_t k = 0; k <= n; ++k) {
                if (std::fabs(v[static_cast<std::size_t>(k)] - pmf(b, k)) > 1e-12) pass = false;
            }
        }
    }

    int median_checked = 0;
    for (int t = 0; t < 4000 && median_checked < 1000; ++t) {
        int n = 2 + static_cast<int>(rng() % 24);
        int m = 1 + static_cast<int>(rng() % (n - 1));
        std::vector<double> probs(n, static_cast<double>(m) / n);
        for (int step = 0; step < 3 * n; ++step) {
            std::size_t i = rng() % n, j = rng() % n;
            if (i == j) continue;
            double delta = unif(rng) * std::min(probs[i], 1.0 - probs[j]);
            probs[i] -= delta;
            probs[j] += delta;
        }
        auto v = pmf_vector(PoissonBinomial(probs));
        double below = 0.0;
        for (int k = 0; k < m; ++k) below += v[static_cast<std::size_t>(k)];
        if (!(below < 0.5 && below + v[static_cast<std::size_t>(m)] > 0.5)) pass = false;
        ++median_checked;
    }
    if (median_checked != 1000) pass = false;

    for (int t = 0; t < 30; ++t) {
        int n = 2 + static_cast<int>(rng() % 29);
        std::vector<double> probs(n);
        for (auto& p : probs) p = unif(rng);
        double beta = 2.0 * unif(rng) - 1.0;
        auto base = pmf_vector(PoissonBinomial(probs));
        auto tilted = pmf_vector(PoissonBinomial(tilt_poisson_binomial(probs, beta)));
        double z = 0.0;
        for (std::size_t j = 0; j < base.size(); ++j) {
            z += std::exp(beta * static_cast<double>(j)) * base[j];
        }
        for (std::size_t j = 0; j < base.size(); ++j) {
            double want = std::exp(beta * static_cast<double>(j)) * base[j] / z;
            if (std::fabs(tilted[j] - want) > 1e-10) pass = false;
        }
    }

    report(9, "bernoulli-sum-properties", pass, "normalization, collapse, median, tilt");
}

// 10. Monte-Carlo sanity on the 3x3 uniform preset: the sampled G^2 mean
// against its asymptotic degrees of freedom and the central quantiles
// against a Kolmogorov band.
void criterion_mc_sanity() {
    auto t0 = std::chrono::steady_clock::now();
    ContingencyTable expected = preset_table("3x3-4");
    const std::int64_t count = 100000;
    auto samples = sample_statistics(expected, TableStatistic::G2, count, 1);

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(count - 1);
    double se = std::sqrt(var / static_cast<double>(count));
    bool mean_ok = std::fabs(mean - 4.0) <= 3.0 * se;

    QQSeries q = qq_against_chi2(samples, 4);
    double band = 1.628 / std::sqrt(static_cast<double>(count));
    double worst = 0.0;
    for (std::size_t i = 0; i < q.sample_quantiles.size(); ++i) {
        double u = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        if (u < 0.01 || u > 0.99) continue;
        worst = std::max(worst, std::fabs(chi2_cdf(4, q.sample_quantiles[i]) - u));
    }
    bool band_ok = worst < band;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "mean %.4f (|dev| %.1f SE), central dev %.4f vs band %.4f, %.1fs", mean,
                  std::fabs(mean - 4.0) / se, worst, band, elapsed_since(t0));
    report(10, "monte-carlo-sanity", mean_ok && band_ok, buf);
}

int main(int argc, char** argv) {
    bool full = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) full = true;
    }

    criterion_fig3();
    criterion_exhaustive(full ? 200 : 120);
    criterion_pruned(full ? 2270 : 600);
    criterion_poisson_constant();
    criterion_family_sweeps();
    criterion_bound_sweep();
    criterion_derivatives();
    criterion_saddle_point();
    criterion_poisson_binomial();
    criterion_mc_sanity();

    std::printf("%d of 10 criteria failed\n", g_failures);
    return g_failures;
}
