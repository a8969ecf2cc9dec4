#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rankhc/calibration.hpp"
#include "rankhc/simgen.hpp"
#include "rankhc/theory.hpp"

using namespace rankhc;
using namespace rankhc::simgen;

TEST_CASE("sparsity exponent reproduces the requested anomaly count") {
    for (std::size_t n : {100, 500, 1000}) {
        for (std::size_t s : {1, 3, 6, 10}) {
            SignalSpec spec;
            spec.n = n;
            spec.t = 5;
            spec.beta = beta_for_count(n, s);
            CHECK(spec.anomalous() == s);
        }
    }
    CHECK_THROWS(beta_for_count(100, 0));
}

TEST_CASE("tilted-uniform quantile normalization and small-theta series") {
    CHECK(uniform_tilt_quantile(0.0, 2.0) == 0.0);
    CHECK(uniform_tilt_quantile(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    // series branch agrees with the direct formula where both are stable
    for (double u : {0.1, 0.5, 0.9}) {
        const double direct = uniform_tilt_quantile(u, 1e-5);
        const double series = u + 1e-5 * u * (1.0 - u) / 2.0;
        CHECK(direct == doctest::Approx(series).epsilon(1e-9));
    }
    // theta -> 0 limit is the identity
    CHECK(uniform_tilt_quantile(0.42, 1e-9) == doctest::Approx(0.42).epsilon(1e-8));
    // positive tilt raises the density toward 1, lifting the median
    CHECK(uniform_tilt_quantile(0.5, 1.0) > 0.5);
}

TEST_CASE("generators reduce to the null at tau = 0") {
    for (SignalFamily family :
         {SignalFamily::NormalShift, SignalFamily::ExponentialRate,
          SignalFamily::UniformTilt, SignalFamily::ConvolutionNormal,
          SignalFamily::CauchyShift}) {
        SignalSpec spec;
        spec.setting = family;
        spec.tau = 0.0;
        spec.beta = 0.75;
        spec.n = 200;
        spec.t = 3;
        CHECK(spec.theta() == 0.0);
        const ObservationMatrix m = generate(spec, RngSeed{3});
        // anomalous and null blocks share the distribution; compare means
        // loosely (exact equality is impossible, the draws differ)
        if (family != SignalFamily::CauchyShift) {
            double lo = 0.0, hi = 0.0;
            const std::size_t s = spec.anomalous();
            for (std::size_t i = 0; i < m.n(); ++i)
                for (std::size_t j = 0; j < m.t(); ++j)
                    (i < s ? lo : hi) += m.at(i, j);
            lo /= static_cast<double>(s * m.t());
            hi /= static_cast<double>((m.n() - s) * m.t());
            CHECK(std::abs(lo - hi) < 1.0);
        }
    }
}

TEST_CASE("normal-shift anomalies have mean theta") {
    SignalSpec spec;
    spec.setting = SignalFamily::NormalShift;
    spec.tau = 1.5;
    spec.beta = 0.55;
    spec.n = 400;
    spec.t = 6;
    const std::size_t s = spec.anomalous();
    REQUIRE(s >= 10);
    const double theta = spec.theta();
    const ObservationMatrix m = generate(spec, RngSeed{9});
    double mean = 0.0;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < spec.t; ++j) mean += m.at(i, j);
    mean /= static_cast<double>(s * spec.t);
    // unit-variance entries: allow 4 standard errors
    CHECK(std::abs(mean - theta) < 4.0 / std::sqrt(static_cast<double>(s * spec.t)));
}

TEST_CASE("generation is deterministic in the seed") {
    SignalSpec spec;
    spec.setting = SignalFamily::ConvolutionTriangular;
    spec.tau = 1.0;
    spec.beta = 0.7;
    spec.n = 50;
    spec.t = 4;
    spec.sigma = 0.5;
    const ObservationMatrix a = generate(spec, RngSeed{10});
    const ObservationMatrix b = generate(spec, RngSeed{10});
    const ObservationMatrix c = generate(spec, RngSeed{11});
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
}

TEST_CASE("excessive exponential tilt is rejected") {
    Rng rng = Rng::derive(RngSeed{1}, 1);
    CHECK_THROWS(sample_anomalous(SignalFamily::ExponentialRate, 1.6, 1.0, rng));
    CHECK_NOTHROW(sample_anomalous(SignalFamily::ExponentialRate, 1.4, 1.0, rng));
}

TEST_CASE("two-outcome fixture enumerates the indicator moments exactly") {
    const TwoOutcomeFixture fx = two_outcome_fixture(10, 4);
    CHECK(fx.sum_var == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
    CHECK(fx.sum_cov == doctest::Approx(3.0 / 2.0).epsilon(1e-12));
    CHECK(fx.identity_holds);
    CHECK(fx.z_q == doctest::Approx((2.0 * 10.0 - 4.0) / 2.0));
    CHECK(fx.q == doctest::Approx(3.0 * 25.0 / (99.0 * std::log(10.0))).epsilon(1e-12));

    const TwoOutcomeFixture big = two_outcome_fixture(50, 7);
    CHECK(big.sum_var == doctest::Approx(6.0 / 4.0).epsilon(1e-12));
    CHECK(big.sum_cov == doctest::Approx(6.0 * 5.0 / 4.0).epsilon(1e-12));
    CHECK(big.identity_holds);

    CHECK_THROWS(two_outcome_fixture(10, 2));
    CHECK_THROWS(two_outcome_fixture(10, 9));
}

TEST_CASE("fixture's grid value reproduces its rank-mean threshold") {
    for (auto [n, s] : std::vector<std::pair<std::size_t, std::size_t>>{
             {10, 4}, {50, 7}, {30, 5}}) {
        const TwoOutcomeFixture fx = two_outcome_fixture(n, s);
        const RankMoments mom = rank_moments(n);
        const double z_std = threshold_z(fx.q, n, 2);
        CHECK(mom.rbar + mom.sigma_r * z_std == doctest::Approx(fx.z_q).epsilon(1e-9));
    }
}

TEST_CASE("power experiment separates null from strong signal") {
    SignalSpec spec;
    spec.setting = SignalFamily::NormalShift;
    spec.beta = beta_for_count(50, 3);
    spec.n = 50;
    spec.t = 3;
    const GridSpec grid = make_grid(GridKind::Extended, 50, 3);
    const NullTable table = tabulate_null(50, 3, grid, 3000, 3000, RngSeed{12});
    MethodSet methods;
    methods.rank_table = &table;
    const std::vector<double> taus{0.0, 2.5};
    const auto curves = power_experiment(spec, taus, 0.05, 200, methods, RngSeed{13});
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].points.size() == 2);
    const PowerPoint& null_pt = curves[0].points[0];
    const PowerPoint& sig_pt = curves[0].points[1];
    CHECK(null_pt.ci_lo <= 0.05);
    CHECK(null_pt.power < 0.15);
    CHECK(sig_pt.power > null_pt.power);
    CHECK(sig_pt.power > 0.5);
    CHECK(curves[0].s == 3);

    // identical seeds reproduce the curve
    const auto again = power_experiment(spec, taus, 0.05, 200, methods, RngSeed{13});
    CHECK(again[0].points[1].rejections == sig_pt.rejections);
}

TEST_CASE("rank test is invariant to subject relabeling") {
    SignalSpec spec;
    spec.setting = SignalFamily::UniformTilt;
    spec.tau = 1.0;
    spec.beta = 0.7;
    spec.n = 40;
    spec.t = 3;
    const GridSpec grid = make_grid(GridKind::Extended, 40, 3);
    const NullTable table = tabulate_null(40, 3, grid, 2000, 2000, RngSeed{14});
    const ObservationMatrix m = generate(spec, RngSeed{15});
    std::vector<double> rotated(m.values().size());
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            rotated[((i + 17) % 40) * 3 + j] = m.at(i, j);
    const ObservationMatrix m2(40, 3, std::move(rotated));
    const TestResult a = test_random_ties(m, table, RngSeed{16});
    const TestResult b = test_random_ties(m2, table, RngSeed{99});
    CHECK(a.profile.statistic == b.profile.statistic);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("grid comparison runs the same data through both resolutions") {
    SignalSpec spec;
    spec.setting = SignalFamily::NormalShift;
    spec.beta = beta_for_count(40, 2);
    spec.n = 40;
    spec.t = 3;
    const std::vector<double> taus{0.0, 2.0};
    const std::vector<int> kns{7, 14};
    const auto curves = grid_experiment(spec, taus, 0.05, 100, kns, 1000, 1000,
                                        RngSeed{17});
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].label == "random-ties[k_n=7]");
    CHECK(curves[1].label == "random-ties[k_n=14]");
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(std::abs(curves[0].points[k].power - curves[1].points[k].power) < 0.25);
}

TEST_CASE("experiment outputs serialize to CSV and a manifest") {
    SignalSpec spec;
    spec.setting = SignalFamily::NormalShift;
    spec.beta = 0.75;
    spec.n = 40;
    spec.t = 3;
    const GridSpec grid = make_grid(GridKind::Extended, 40, 3);
    const NullTable table = tabulate_null(40, 3, grid, 1000, 1000, RngSeed{18});
    MethodSet methods;
    methods.rank_table = &table;
    methods.friedman_mc = 300;
    const std::vector<double> taus{0.0};
    const auto curves = power_experiment(spec, taus, 0.05, 100, methods, RngSeed{19});
    REQUIRE(curves.size() == 2);

    const auto path = (std::filesystem::temp_directory_path() / "rankhc_power.csv").string();
    write_power_csv(curves, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "tau,method,power,ci_lo,ci_hi,trials");
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    std::filesystem::remove(path);

    const auto manifest = nlohmann::json::parse(
        power_manifest_json(curves, spec, taus, 100, RngSeed{19}));
    CHECK(manifest["seed"] == 19);
    CHECK(manifest["trials"] == 100);
    CHECK(manifest["methods"].size() == 2);
    CHECK(manifest["setting"] == "normal-shift");
}
