#include "rankhc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "rankhc/hc.hpp"
#include "rankhc/parallel.hpp"
#include "rankhc/ranking.hpp"

namespace rankhc::simgen {

namespace {

RngSeed sub_seed(RngSeed seed, std::uint64_t k1, std::uint64_t k2 = 0,
                 std::uint64_t k3 = 0) {
    return RngSeed{Rng::derive(seed, k1, k2, k3).next_u64()};
}

// Wilson score interval at 95%.
void wilson_ci(std::size_t successes, std::size_t trials, double& lo,
               double& hi) {
    constexpr double z = 1.959963984540054;
    const double nd = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (p + z2 / (2.0 * nd)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

}  // namespace

SignalFamily parse_family(const std::string& name) {
    if (name == "normal-shift") return SignalFamily::NormalShift;
    if (name == "exponential-rate") return SignalFamily::ExponentialRate;
    if (name == "uniform-tilt") return SignalFamily::UniformTilt;
    if (name == "convolution-normal") return SignalFamily::ConvolutionNormal;
    if (name == "convolution-triangular")
        return SignalFamily::ConvolutionTriangular;
    if (name == "cauchy-shift") return SignalFamily::CauchyShift;
    throw std::invalid_argument("unknown signal family: " + name);
}

const char* family_name(SignalFamily family) {
    switch (family) {
        case SignalFamily::NormalShift: return "normal-shift";
        case SignalFamily::ExponentialRate: return "exponential-rate";
        case SignalFamily::UniformTilt: return "uniform-tilt";
        case SignalFamily::ConvolutionNormal: return "convolution-normal";
        case SignalFamily::ConvolutionTriangular:
            return "convolution-triangular";
        case SignalFamily::CauchyShift: return "cauchy-shift";
    }
    return "unknown";
}

double beta_for_count(std::size_t n, std::size_t s) {
    if (s == 0 || s > n)
        throw std::invalid_argument("beta_for_count: need 1 <= s <= n");
    const double beta = 1.0 - std::log(static_cast<double>(s)) /
                                  std::log(static_cast<double>(n));
    return beta;
}

std::size_t SignalSpec::anomalous() const {
    const double nd = static_cast<double>(n);
    const double raw = std::pow(nd, 1.0 - beta);
    const auto s = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::min(std::max<std::size_t>(s, 1), n);
}

double SignalSpec::theta() const {
    return theory::theta_tau(setting, tau, beta, n, t, sigma);
}

double sample_null(SignalFamily family, double sigma, Rng& rng) {
    (void)sigma;  // null columns are standard in every family
    switch (family) {
        case SignalFamily::NormalShift:
        case SignalFamily::ConvolutionNormal:
        case SignalFamily::ConvolutionTriangular:
            return rng.normal();
        case SignalFamily::ExponentialRate:
            return rng.exponential(1.5);
        case SignalFamily::UniformTilt:
            return rng.uniform();
        case SignalFamily::CauchyShift:
            return rng.cauchy(0.0, 1.0);
    }
    throw std::invalid_argument("sample_null: unknown signal family");
}

double uniform_tilt_quantile(double u, double theta) {
    if (std::abs(theta) < 1e-6)
        return u + theta * u * (1.0 - u) / 2.0;
    return std::log1p(u * std::expm1(theta)) / theta;
}

double sample_anomalous(SignalFamily family, double theta, double sigma,
                        Rng& rng) {
    switch (family) {
        case SignalFamily::NormalShift:
            return theta + rng.normal();
        case SignalFamily::ExponentialRate: {
            const double rate = 1.5 - theta;
            if (!(rate > 0.0))
                throw std::invalid_argument(
                    "exponential-rate: theta must stay below 3/2");
            return rng.exponential(rate);
        }
        case SignalFamily::UniformTilt:
            return uniform_tilt_quantile(rng.uniform(), theta);
        case SignalFamily::ConvolutionNormal:
            return sigma * rng.normal() + theta;
        case SignalFamily::ConvolutionTriangular:
            return sigma * rng.normal() +
                   theta * 0.5 * (rng.uniform() + rng.uniform());
        case SignalFamily::CauchyShift:
            return rng.cauchy(theta, 1.0);
    }
    throw std::invalid_argument("sample_anomalous: unknown signal family");
}

ObservationMatrix generate(const SignalSpec& spec, RngSeed seed) {
    if (spec.n < 2 || spec.t < 1)
        throw std::invalid_argument("generate: need n >= 2, t >= 1");
    if (!(spec.beta > 0.5 && spec.beta < 1.0))
        throw std::invalid_argument("generate: beta must lie in (0.5, 1)");
    if (spec.tau < 0.0)
        throw std::invalid_argument("generate: tau must be >= 0");
    const double theta = spec.theta();
    if (!std::isfinite(theta))
        throw std::invalid_argument("generate: nonfinite theta");
    const std::size_t s = spec.anomalous();

    std::vector<double> values(spec.n * spec.t);
    for (std::size_t i = 0; i < spec.n; ++i) {
        Rng rng = Rng::derive(seed, 0x67, i);
        for (std::size_t j = 0; j < spec.t; ++j) {
            values[i * spec.t + j] =
                i < s ? sample_anomalous(spec.setting, theta, spec.sigma, rng)
                      : sample_null(spec.setting, spec.sigma, rng);
        }
    }
    return ObservationMatrix(spec.n, spec.t, std::move(values));
}

OracleNullSpec oracle_for(SignalFamily family) {
    switch (family) {
        case SignalFamily::NormalShift:
        case SignalFamily::ConvolutionNormal:
        case SignalFamily::ConvolutionTriangular:
            return oracle_normal();
        case SignalFamily::ExponentialRate:
            return oracle_exponential();
        case SignalFamily::UniformTilt:
            return oracle_uniform();
        case SignalFamily::CauchyShift:
            return oracle_cauchy();
    }
    throw std::invalid_argument("oracle_for: unknown signal family");
}

std::vector<PowerCurve> power_experiment(const SignalSpec& base,
                                         std::span<const double> taus,
                                         double alpha, std::size_t trials,
                                         const MethodSet& methods,
                                         RngSeed seed) {
    if (trials < 100)
        throw std::invalid_argument("power_experiment: need trials >= 100");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("power_experiment: alpha in (0, 1)");
    if (methods.rank_table &&
        (methods.rank_table->n != base.n || methods.rank_table->t != base.t))
        throw std::invalid_argument(
            "power_experiment: null table shape does not match spec");
    if (methods.dist &&
        (methods.dist->n != base.n || methods.dist->t != base.t))
        throw std::invalid_argument(
            "power_experiment: calibration shape does not match spec");

    struct MethodPlan {
        std::string label;
        int kind;  // 0 rank, 1 dist, 2 perm, 3 friedman
    };
    std::vector<MethodPlan> plan;
    if (methods.rank_table) plan.push_back({"random-ties", 0});
    if (methods.dist) plan.push_back({"dist-hc", 1});
    if (methods.perm_b > 0) plan.push_back({"perm-hc", 2});
    if (methods.friedman_mc > 0) plan.push_back({"friedman", 3});
    if (plan.empty())
        throw std::invalid_argument("power_experiment: no method enabled");

    // rejected[tau][method * trials + trial]
    std::vector<std::vector<std::uint8_t>> rejected(
        taus.size(), std::vector<std::uint8_t>(plan.size() * trials, 0));

    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        SignalSpec spec = base;
        spec.tau = taus[ti];
        parallel_for(trials, [&](std::size_t trial) {
            const RngSeed data_seed = sub_seed(seed, 0x64617461, ti, trial);
            const ObservationMatrix m = generate(spec, data_seed);
            for (std::size_t mi = 0; mi < plan.size(); ++mi) {
                const RngSeed test_seed =
                    sub_seed(data_seed, 0x74657374, plan[mi].kind);
                TestResult res;
                switch (plan[mi].kind) {
                    case 0:
                        res = test_random_ties(m, *methods.rank_table,
                                               test_seed);
                        break;
                    case 1:
                        res = dist_aware_hc(m, *methods.dist);
                        break;
                    case 2:
                        res = raw_permutation_hc(
                            m, methods.rank_table ? methods.rank_table->grid.k_n
                                                  : 0,
                            methods.perm_b, test_seed);
                        break;
                    default:
                        res = friedman_test(m, methods.friedman_mc, test_seed);
                        break;
                }
                rejected[ti][mi * trials + trial] =
                    res.reject(alpha) ? 1 : 0;
            }
        });
    }

    std::vector<PowerCurve> curves(plan.size());
    for (std::size_t mi = 0; mi < plan.size(); ++mi) {
        PowerCurve& c = curves[mi];
        c.label = plan[mi].label;
        c.setting = base.setting;
        c.n = base.n;
        c.t = base.t;
        c.s = base.anomalous();
        c.alpha = alpha;
        c.seed = seed;
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            PowerPoint pt;
            pt.tau = taus[ti];
            pt.trials = trials;
            for (std::size_t trial = 0; trial < trials; ++trial)
                pt.rejections += rejected[ti][mi * trials + trial];
            pt.power = static_cast<double>(pt.rejections) /
                       static_cast<double>(trials);
            wilson_ci(pt.rejections, trials, pt.ci_lo, pt.ci_hi);
            c.points.push_back(pt);
        }
    }
    return curves;
}

std::vector<PowerCurve> grid_experiment(const SignalSpec& base,
                                        std::span<const double> taus,
                                        double alpha, std::size_t trials,
                                        std::span<const int> k_n_list,
                                        std::size_t mc_pq, std::size_t mc_t,
                                        RngSeed seed) {
    std::vector<PowerCurve> out;
    for (int k_n : k_n_list) {
        const GridSpec grid = make_grid(GridKind::Extended, base.n, base.t, k_n);
        const NullTable table =
            tabulate_null(base.n, base.t, grid, mc_pq, mc_t,
                          sub_seed(seed, 0x7461626c, static_cast<std::uint64_t>(k_n)));
        MethodSet methods;
        methods.rank_table = &table;
        // same outer seed so data seeds match across k_n
        std::vector<PowerCurve> curves =
            power_experiment(base, taus, alpha, trials, methods, seed);
        curves[0].label = "random-ties[k_n=" + std::to_string(grid.k_n) + "]";
        out.push_back(std::move(curves[0]));
    }
    return out;
}

std::vector<PowerCurve> stream_length_experiment(
    SignalFamily setting, std::size_t n, std::size_t s,
    std::span<const double> taus, std::span<const std::size_t> t_list,
    double alpha, std::size_t trials, std::size_t mc_pq, std::size_t mc_t,
    RngSeed seed) {
    std::vector<PowerCurve> out;
    for (std::size_t t : t_list) {
        SignalSpec spec;
        spec.setting = setting;
        spec.beta = beta_for_count(n, s);
        spec.n = n;
        spec.t = t;
        const GridSpec grid = make_grid(GridKind::Extended, n, t);
        const NullTable table = tabulate_null(
            n, t, grid, mc_pq, mc_t, sub_seed(seed, 0x7461626c, t));
        MethodSet methods;
        methods.rank_table = &table;
        std::vector<PowerCurve> curves = power_experiment(
            spec, taus, alpha, trials, methods, sub_seed(seed, 0x74, t));
        curves[0].label = "random-ties[t=" + std::to_string(t) + "]";
        out.push_back(std::move(curves[0]));
    }
    return out;
}

TwoOutcomeFixture two_outcome_fixture(std::size_t n, std::size_t s) {
    if (s < 3 || s + 3 > n)
        throw std::invalid_argument(
            "two_outcome_fixture: need 3 <= s <= n - 3");
    TwoOutcomeFixture fx;
    fx.n = n;
    fx.s = s;
    const double sd = static_cast<double>(s);
    const double nd = static_cast<double>(n);

    // Subject 0 is the switch: the coin only moves its column-2 entry across
    // the other anomalous entries, shifting each of their column-2 ranks by
    // one. Those s - 1 subjects have rank sum 2n - s - 1 in outcome 1 and
    // 2n - s in outcome 2, so the closed threshold z_q = (2n - s)/2 makes
    // their indicators flip together with the coin.
    fx.x1.assign(n * 2, 0.0);
    // column 1: switch at the bottom, the rest of the block at the top
    fx.x1[0] = -10.0;
    for (std::size_t i = 1; i < s; ++i)
        fx.x1[i * 2] = static_cast<double>(s - i);
    // column 2: the block holds 1..s-1; the switch sits above it (outcome 1)
    fx.x1[1] = sd + 3.0;
    for (std::size_t i = 1; i < s; ++i)
        fx.x1[i * 2 + 1] = static_cast<double>(i);
    // nulls: distinct values inside (-2, -1); the two nulls with the lowest
    // column-1 ranks carry the two column-2 values above the block, so their
    // rank sums stay far below the threshold in both outcomes
    for (std::size_t i = s; i < n; ++i) {
        const double u = -2.0 + (static_cast<double>(i - s) + 1.0) /
                                    (static_cast<double>(n - s) + 1.0);
        fx.x1[i * 2] = u;
        fx.x1[i * 2 + 1] = u;
    }
    fx.x1[s * 2 + 1] = sd + 2.0;
    fx.x1[(s + 1) * 2 + 1] = sd + 1.0;
    fx.x2 = fx.x1;
    // outcome 2: the switch drops just below the block's column-2 entries
    fx.x2[1] = 0.5;

    fx.z_q = (2.0 * nd - sd) / 2.0;
    fx.q = 3.0 * (nd - sd - 1.0) * (nd - sd - 1.0) /
           ((nd * nd - 1.0) * std::log(nd));

    const auto indicators = [&](const std::vector<double>& values) {
        const ObservationMatrix m(n, 2, values);
        const RankMatrix r = compute_ranks(m, TiePolicy::RandomTies, RngSeed{0});
        const std::vector<double> means = subject_rank_means(r);
        std::vector<double> ind(n);
        for (std::size_t i = 0; i < n; ++i)
            ind[i] = means[i] >= fx.z_q ? 1.0 : 0.0;
        return ind;
    };
    const std::vector<double> i1 = indicators(fx.x1);
    const std::vector<double> i2 = indicators(fx.x2);

    // Exact moments over the two equiprobable outcomes.
    fx.sum_var = 0.0;
    fx.sum_cov = 0.0;
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = 0.5 * (i1[i] + i2[i]);
        fx.sum_var += e[i] - e[i] * e[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (i == k) continue;
            fx.sum_cov += 0.5 * (i1[i] * i1[k] + i2[i] * i2[k]) - e[i] * e[k];
        }
    fx.identity_holds =
        std::abs(fx.sum_cov - (sd - 2.0) * fx.sum_var) < 1e-9;
    return fx;
}

void write_power_csv(const std::vector<PowerCurve>& curves,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "tau,method,power,ci_lo,ci_hi,trials\n";
    out.precision(10);
    for (const PowerCurve& c : curves)
        for (const PowerPoint& pt : c.points)
            out << pt.tau << ',' << c.label << ',' << pt.power << ','
                << pt.ci_lo << ',' << pt.ci_hi << ',' << pt.trials << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string power_manifest_json(const std::vector<PowerCurve>& curves,
                                const SignalSpec& base,
                                std::span<const double> taus,
                                std::size_t trials, RngSeed seed) {
    nlohmann::json j;
    j["setting"] = family_name(base.setting);
    j["n"] = base.n;
    j["t"] = base.t;
    j["beta"] = base.beta;
    j["sigma"] = base.sigma;
    j["anomalous"] = base.anomalous();
    j["taus"] = std::vector<double>(taus.begin(), taus.end());
    j["trials"] = trials;
    j["seed"] = seed.value;
    j["methods"] = nlohmann::json::array();
    for (const PowerCurve& c : curves) {
        nlohmann::json m;
        m["label"] = c.label;
        m["alpha"] = c.alpha;
        m["seed"] = c.seed.value;
        j["methods"].push_back(m);
    }
    return j.dump(2);
}

}  // namespace rankhc::simgen
