#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "siglik/signed_loglik.hpp"
#include "siglik/table.hpp"
#include "oracles.hpp"

using namespace siglik;

TEST_CASE("divergence closed forms") {
    CHECK(divergence(Binomial(10, 0.3), 3) == 0.0);
    CHECK(divergence(InverseGaussian(1.0, 1.0), 2.0) == Catch::Approx(0.25).epsilon(1e-14));
    CHECK(divergence(NegBinomial(0.5, 2.0), 2) == 0.0);  // fitted p equals the null p
    CHECK(divergence(Poisson(3.0), 0) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(divergence(GammaDist(2.0, 1.0), 1.0) == 0.0);
}

TEST_CASE("hypergeometric divergence equals the induced table's N*I") {
    for (std::int64_t x = 1; x <= 14; ++x) {
        double via_family = divergence(Hypergeometric(40, 15, 15), x);
        ContingencyTable t = two_by_two_table(TwoByTwoMargins(40, 15, 15), x);
        CHECK(via_family == Catch::Approx(mutual_information(t).ni).margin(1e-13));
    }
}

TEST_CASE("signed log-likelihood reproduces the reference step abscissae") {
    DistSpec h = Hypergeometric(40, 15, 15);
    CHECK(signed_ll(h, 1.0).g == Catch::Approx(-3.3586706).margin(1e-6));
    CHECK(signed_ll(h, 6.0).g == Catch::Approx(0.2525852).margin(1e-6));  // first point >= mean 5.625
    CHECK(signed_ll(h, 1.0).side == Side::BelowMean);
    CHECK(signed_ll(h, 6.0).side == Side::AtOrAboveMean);
    CHECK(signed_ll(DistSpec(InverseGaussian(1.0, 1.0)), 1.0).g == 0.0);
    CHECK(signed_ll(DistSpec(Binomial(40, 0.25)), 10.0).g == 0.0);
}

TEST_CASE("g squared is twice the divergence") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 60);
        double p = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 999.0;
        std::int64_t x = static_cast<std::int64_t>(rng() % (n + 1));
        SignedLL s = signed_ll(DistSpec(Binomial(n, p)), static_cast<double>(x));
        if (s.divergence > 0.0) {
            CHECK(s.g * s.g == Catch::Approx(2.0 * s.divergence).epsilon(1e-12));
        }
        CHECK((s.g < 0.0) == (s.side == Side::BelowMean));
    }
}

TEST_CASE("inverse Gaussian g matches its closed form") {
    for (double mu : {0.3, 1.0, 2.5}) {
        for (double lambda : {0.4, 1.0, 7.0}) {
            DistSpec d = InverseGaussian(mu, lambda);
            for (double x : {0.2 * mu, 0.9 * mu, mu, 1.7 * mu, 6.0 * mu}) {
                double closed = std::sqrt(lambda) * (x - mu) / (std::sqrt(x) * mu);
                CHECK(signed_ll(d, x).g == Catch::Approx(closed).margin(1e-12));
            }
        }
    }
}

TEST_CASE("phi_g basics") {
    CHECK(phi_g(DistSpec(Binomial(10, 0.3)), 3.0) == 0.5);
    double v = phi_g(DistSpec(Hypergeometric(40, 15, 15)), 1.0);
    CHECK(v == Catch::Approx(static_cast<double>(oracle::gaussian_cdf(-3.3586706055L))).epsilon(1e-6));
    Binomial b(10, 0.5);
    double est = phi_g(DistSpec(b), 4.0);
    CHECK(est > cdf(b, 3));
    CHECK(est < cdf(b, 4));
}

TEST_CASE("binomial and negative binomial G-transforms are dual") {
    for (std::int64_t n : {3, 10, 25, 40}) {
        for (double p : {0.1, 0.37, 0.5, 0.81}) {
            for (std::int64_t ell = 1; ell <= n; ++ell) {
                double g_bin = signed_ll(DistSpec(Binomial(n, p)), static_cast<double>(ell)).g;
                double g_nb =
                    signed_ll(DistSpec(NegBinomial(p, static_cast<double>(ell))),
                              static_cast<double>(n - ell))
                        .g;
                CHECK(g_bin == Catch::Approx(-g_nb).margin(1e-12));
            }
        }
    }
}

TEST_CASE("saddle-point form of the inverse Gaussian density") {
    for (double mu : {0.2, 1.0, 4.0}) {
        for (double lambda : {0.3, 1.0, 9.0}) {
            InverseGaussian d(mu, lambda);
            for (double x : {0.1 * mu, 0.5 * mu, mu, 2.0 * mu, 8.0 * mu}) {
                double g = signed_ll(DistSpec(d), x).g;
                double v = x * x * x / lambda;
                CHECK(pdf(d, x) == Catch::Approx(gaussian_pdf(g) / std::sqrt(v)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("phi_g_mu0_derivative against central differences") {
    // Poisson at lambda=4, x=2
    {
        double fd = oracle::central_difference(
            [](double u) { return phi_g(DistSpec(Poisson(u)), 2.0); }, 4.0, 1e-5);
        CHECK(phi_g_mu0_derivative(DistSpec(Poisson(4.0)), 2.0) ==
              Catch::Approx(fd).epsilon(1e-6));
    }
    // Gamma at alpha=2, mean=1, x=3: negative sign, matches differences
    {
        double exact = phi_g_mu0_derivative(DistSpec(GammaDist(2.0, 1.0)), 3.0);
        CHECK(exact < 0.0);
        double fd = oracle::central_difference(
            [](double u) { return phi_g(DistSpec(GammaDist(2.0, u)), 3.0); }, 1.0, 1e-5);
        CHECK(exact == Catch::Approx(fd).epsilon(1e-6));
    }
    // Binomial with fixed n: mu0 = n p
    {
        double exact = phi_g_mu0_derivative(DistSpec(Binomial(12, 0.4)), 7.0);
        double fd = oracle::central_difference(
            [](double u) { return phi_g(DistSpec(Binomial(12, u / 12.0)), 7.0); }, 4.8, 1e-5);
        CHECK(exact == Catch::Approx(fd).epsilon(1e-6));
    }
    // Negative binomial: p(mu) = ell / (ell + mu)
    {
        double ell = 3.0, p = 0.4;
        double mu0 = ell * (1.0 - p) / p;
        double exact = phi_g_mu0_derivative(DistSpec(NegBinomial(p, ell)), 2.0);
        double fd = oracle::central_difference(
            [&](double u) { return phi_g(DistSpec(NegBinomial(ell / (ell + u), ell)), 2.0); }, mu0,
            1e-5);
        CHECK(exact == Catch::Approx(fd).epsilon(1e-6));
    }
    // Inverse Gaussian
    {
        double exact = phi_g_mu0_derivative(DistSpec(InverseGaussian(1.5, 2.0)), 0.8);
        double fd = oracle::central_difference(
            [](double u) { return phi_g(DistSpec(InverseGaussian(u, 2.0)), 0.8); }, 1.5, 1e-5);
        CHECK(exact == Catch::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("phi_g_mu0_derivative limit at the mean") {
    double v = 10.0 * 0.3 * 0.7;
    CHECK(phi_g_mu0_derivative(DistSpec(Binomial(10, 0.3)), 3.0) ==
          Catch::Approx(-gaussian_pdf(0.0) / std::sqrt(v)).epsilon(1e-14));
    CHECK(phi_g_mu0_derivative(DistSpec(Poisson(4.0)), 4.0) ==
          Catch::Approx(-gaussian_pdf(0.0) / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(phi_g_mu0_derivative(DistSpec(Hypergeometric(40, 15, 15)), 1.0),
                    std::domain_error);
}

TEST_CASE("negative binomial pmf derivative lemma") {
    // k = 0 specializes to -p^(ell+1)
    for (double p : {0.2, 0.5, 0.9}) {
        for (double ell : {0.7, 1.0, 4.0}) {
            CHECK(negbin_pmf_mu_derivative(p, ell, 0) ==
                  Catch::Approx(-std::pow(p, ell + 1.0)).epsilon(1e-13));
        }
    }
    CHECK(negbin_pmf_mu_derivative(0.5, 1.0, 1) == Catch::Approx(0.0).margin(1e-15));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int done = 0;
    while (done < 60) {
        double p = 0.1 + 0.8 * unif(rng);
        double ell = 0.5 + 8.0 * unif(rng);
        std::int64_t k = static_cast<std::int64_t>(rng() % 20);
        double exact = negbin_pmf_mu_derivative(p, ell, k);
        if (std::fabs(exact) < 1e-6) continue;  // relative comparison needs a signal
        double mu0 = ell * (1.0 - p) / p;
        double fd = oracle::central_difference(
            [&](double u) { return pmf(NegBinomial(ell / (ell + u), ell), k); }, mu0, 1e-5);
        CHECK(exact == Catch::Approx(fd).epsilon(1e-6));
        ++done;
    }
    CHECK_THROWS_AS(negbin_pmf_mu_derivative(1.0, 1.0, 2), std::domain_error);
    CHECK_THROWS_AS(negbin_pmf_mu_derivative(0.0, 1.0, 2), std::domain_error);
}

TEST_CASE("divergence rejects out-of-support points") {
    CHECK_THROWS_AS(divergence(Binomial(10, 0.3), 11), std::domain_error);
    CHECK_THROWS_AS(divergence(GammaDist(1.0, 1.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(divergence(Hypergeometric(40, 15, 15), 16), std::domain_error);
    CHECK_THROWS_AS(divergence(DistSpec(PoissonBinomial({0.5})), 0.0), std::domain_error);
}
