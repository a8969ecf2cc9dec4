#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rankhc/theory.hpp"

using namespace rankhc;
using namespace rankhc::theory;

TEST_CASE("detection boundary branch values") {
    CHECK(rho(0.75, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // homoskedastic, dense-ish branch: beta <= 3/4 at sigma = 1
    CHECK(rho(0.6, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
    // homoskedastic, sparse branch
    CHECK(rho(0.85, 1.0) ==
          doctest::Approx(std::pow(1.0 - std::sqrt(0.15), 2)).epsilon(1e-12));
    // sigma >= sqrt(2): zero below 1 - 1/sigma^2
    CHECK(rho(0.6, 2.0) == 0.0);
    CHECK(rho(0.8, 2.0) ==
          doctest::Approx(std::pow(1.0 - 2.0 * std::sqrt(0.2), 2)).epsilon(1e-12));
    CHECK_THROWS(rho(0.5, 1.0));
    CHECK_THROWS(rho(1.0, 1.0));
    CHECK_THROWS(rho(0.7, -0.1));
}

TEST_CASE("boundary is continuous across both seams") {
    const double eps = 1e-10;
    // beta seam at beta = 1 - sigma^2/4 (sigma < sqrt(2))
    for (double sigma : {0.3, 0.8, 1.0, 1.3}) {
        const double beta = 1.0 - sigma * sigma / 4.0;
        CHECK(std::abs(rho(beta - eps, sigma) - rho(beta + eps, sigma)) < 1e-9);
    }
    // sigma seam at sigma = sqrt(2)
    for (double beta : {0.55, 0.7, 0.9}) {
        const double s = std::numbers::sqrt2;
        CHECK(std::abs(rho(beta, s - eps) - rho(beta, s + eps)) < 1e-9);
    }
    // zero-region seam at beta = 1 - 1/sigma^2 (sigma > sqrt(2))
    for (double sigma : {1.5, 2.0, 3.0}) {
        const double beta = 1.0 - 1.0 / (sigma * sigma);
        CHECK(std::abs(rho(beta - eps, sigma) - rho(beta + eps, sigma)) < 1e-9);
    }
}

TEST_CASE("boundary is nonincreasing in sigma") {
    for (double beta : {0.55, 0.65, 0.8, 0.95}) {
        double prev = rho(beta, 0.0);
        for (double sigma = 0.05; sigma <= 3.0; sigma += 0.05) {
            const double cur = rho(beta, sigma);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("rank-transform heteroskedasticity limits") {
    CHECK(xi_sigma(0.0) == 0.0);
    CHECK(xi_sigma(1.0) == doctest::Approx(1.0).epsilon(1e-8));
    // the limit sqrt(3) is approached at rate O(1/sigma)
    CHECK(xi_sigma(50.0) == doctest::Approx(std::sqrt(3.0)).epsilon(2e-2));
    CHECK(xi_sigma(500.0) == doctest::Approx(std::sqrt(3.0)).epsilon(3e-3));
    double prev = 0.0;
    for (double sigma = 0.1; sigma <= 3.0; sigma += 0.1) {
        const double cur = xi_sigma(sigma);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("rank boundary composes the scale factor with xi") {
    for (double beta : {0.6, 0.8}) {
        for (double sigma : {0.0, 0.5, 1.0}) {
            const double expected =
                std::sqrt(std::numbers::pi * (sigma * sigma + 1.0) / 6.0) *
                rho(beta, xi_sigma(sigma));
            CHECK(rho_tilde(beta, sigma) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    // at sigma = 1, xi = 1, so the ratio to rho is exactly sqrt(pi/3)
    CHECK(rho_tilde(0.8, 1.0) / rho(0.8, 1.0) ==
          doctest::Approx(std::sqrt(std::numbers::pi / 3.0)).epsilon(1e-7));
}

TEST_CASE("inflation-factor closed forms and generic route agree") {
    CHECK(upsilon0_closed_form(ExpFamily::Uniform) == 1.0);
    CHECK(upsilon0_closed_form(ExpFamily::Exponential) ==
          doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(upsilon0_closed_form(ExpFamily::Normal) ==
          doctest::Approx(std::sqrt(std::numbers::pi / 3.0)).epsilon(1e-12));

    // uniform on [0,1]
    const double u_num = upsilon0_numeric(
        [](double) { return 1.0; }, [](double x) { return x; }, 0.5,
        std::sqrt(1.0 / 12.0), 0.0, 1.0);
    CHECK(u_num == doctest::Approx(1.0).epsilon(1e-8));

    // unit-rate exponential
    const double e_num = upsilon0_numeric(
        [](double x) { return std::exp(-x); },
        [](double x) { return 1.0 - std::exp(-x); }, 1.0, 1.0, 0.0, 60.0);
    CHECK(e_num == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-8));

    // standard normal
    const double n_num = upsilon0_numeric(
        [](double x) {
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        },
        [](double x) { return normal_cdf(x); }, 0.0, 1.0, -12.0, 12.0);
    CHECK(n_num == doctest::Approx(std::sqrt(std::numbers::pi / 3.0)).epsilon(1e-6));
}

TEST_CASE("inflation factor is at least one, with equality only at uniform") {
    // Beta(a, a) approaches uniform as a -> 1
    const auto beta22 = upsilon0_numeric(
        [](double x) { return 6.0 * x * (1.0 - x); },
        [](double x) { return x * x * (3.0 - 2.0 * x); },
        0.5, std::sqrt(0.05), 0.0, 1.0);
    CHECK(beta22 > 1.0);
    // Beta(3,3) concentrates further and inflates more
    const auto beta33 = upsilon0_numeric(
        [](double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); },
        [](double x) { return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x); },
        0.5, std::sqrt(1.0 / 28.0), 0.0, 1.0);
    CHECK(beta33 > beta22);
}

TEST_CASE("Monte-Carlo inflation factor route") {
    std::vector<double> samples(200000);
    Rng rng = Rng::derive(RngSeed{77}, 1);
    for (double& s : samples) s = rng.uniform();
    CHECK(upsilon0_mc(samples) == doctest::Approx(1.0).epsilon(0.01));
    for (double& s : samples) s = rng.exponential(1.0);
    CHECK(upsilon0_mc(samples) ==
          doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(0.01));
    CHECK_THROWS(upsilon0_mc(std::vector<double>{1.0, 2.0}));
}

TEST_CASE("powerfulness threshold for convolution signals") {
    const double beta = 0.8, sigma = 0.5;
    const double pm = zeta_g(beta, sigma, ConvolutionG::PointMass);
    const double tri = zeta_g(beta, sigma, ConvolutionG::Triangular);
    CHECK(tri == doctest::Approx(2.0 * pm).epsilon(1e-12));
    const double expected = std::sqrt(
        std::numbers::pi * (sigma * sigma + 1.0) * rho(beta, xi_sigma(sigma)) /
        (6.0 * rho(beta, sigma)));
    CHECK(pm == doctest::Approx(expected).epsilon(1e-12));
    // the oracle boundary is zero at sigma >= sqrt(2), small beta
    CHECK_THROWS_AS(zeta_g(0.6, 2.0, ConvolutionG::PointMass), std::domain_error);
}

TEST_CASE("signal parameterization theta_tau") {
    for (auto family :
         {SignalFamily::NormalShift, SignalFamily::ExponentialRate,
          SignalFamily::UniformTilt, SignalFamily::ConvolutionNormal,
          SignalFamily::CauchyShift})
        CHECK(theta_tau(family, 0.0, 0.8, 100, 5) == 0.0);

    CHECK(theta_tau(SignalFamily::NormalShift, 1.0, 0.85, 1000, 7) ==
          doctest::Approx(0.8607).epsilon(2e-4));
    // scale variance 1/sigma0^2 under the root: exponential sigma0 = 2/3
    CHECK(theta_tau(SignalFamily::ExponentialRate, 1.0, 0.85, 1000, 7) ==
          doctest::Approx(0.8607 * 1.5).epsilon(2e-4));
    // uniform sigma0^2 = 1/12
    CHECK(theta_tau(SignalFamily::UniformTilt, 1.0, 0.85, 1000, 7) ==
          doctest::Approx(0.8607 * std::sqrt(12.0)).epsilon(2e-4));
    // heavy tails carry pi/sqrt(3) against the sigma0 = 1 reference
    CHECK(theta_tau(SignalFamily::CauchyShift, 1.0, 0.85, 1000, 7) ==
          doctest::Approx(0.8607 * std::numbers::pi / std::sqrt(3.0))
              .epsilon(2e-4));
    CHECK_THROWS(theta_tau(SignalFamily::NormalShift, -1.0, 0.85, 1000, 7));
}

TEST_CASE("rank-signal moments from exceedance moments") {
    const auto null_case = characteristics_from_moments(0.5, 1.0 / 3.0);
    CHECK(null_case.mu == doctest::Approx(0.0));
    CHECK(null_case.sigma_sq == doctest::Approx(1.0));
    const auto degenerate = characteristics_from_moments(0.7, 0.49);
    CHECK(degenerate.sigma_sq == doctest::Approx(0.0));
    CHECK(degenerate.mu ==
          doctest::Approx(2.0 * std::sqrt(3.0) * 0.2).epsilon(1e-12));
}

TEST_CASE("identical samplers give null rank-signal moments") {
    const auto sampler = [](Rng& rng) { return rng.normal(); };
    const auto c = anomaly_characteristics(sampler, sampler, 40000, RngSeed{5});
    CHECK(c.mu == doctest::Approx(0.0).epsilon(0.05));
    CHECK(std::abs(c.mu) <= std::sqrt(3.0));
    CHECK(c.sigma_sq == doctest::Approx(1.0).epsilon(0.05));
    CHECK(c.sigma_sq <= 12.0);
    CHECK_THROWS(anomaly_characteristics(sampler, sampler, 100, RngSeed{5}));
}

TEST_CASE("boundary system cases") {
    // gamma^2 >= 2, beta < 1 - 1/gamma^2: r = 0 works with q = 1
    CHECK(check_boundary_system(2.0, 0.6, 0.0, 1.0).holds);
    // small r below the boundary should fail everywhere on a q sweep
    const double gamma = 1.0, beta = 0.8;
    const double r_low = rho(beta, gamma) - 0.05;
    bool any = false;
    for (int k = 1; k <= 200; ++k)
        any = any || check_boundary_system(gamma, beta, r_low, k / 200.0).holds;
    CHECK_FALSE(any);
    // slightly above the boundary a feasible q exists
    const double r_high = rho(beta, gamma) + 0.05;
    bool found = false;
    for (int k = 1; k <= 200; ++k)
        found = found || check_boundary_system(gamma, beta, r_high, k / 200.0).holds;
    CHECK(found);
    CHECK_THROWS(check_boundary_system(-1.0, 0.8, 0.1, 0.5));
    CHECK_THROWS(check_boundary_system(1.0, 0.8, 0.1, 0.0));
}

TEST_CASE("system infimum reproduces the boundary on a small grid") {
    for (double beta : {0.6, 0.75, 0.9}) {
        for (double gamma : {0.5, 1.0, 1.8}) {
            CHECK(std::abs(boundary_system_infimum(gamma, beta) -
                           rho(beta, gamma)) < 1e-3);
        }
    }
}
