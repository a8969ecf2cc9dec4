#include "rankhc/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rankhc/parallel.hpp"

namespace rankhc {

namespace {

RngSeed sub_seed(RngSeed seed, std::uint64_t k1, std::uint64_t k2 = 0) {
    return RngSeed{Rng::derive(seed, k1, k2).next_u64()};
}

double add_one_p(double t_obs, const std::vector<double>& sorted_null) {
    const auto it =
        std::lower_bound(sorted_null.begin(), sorted_null.end(), t_obs);
    const auto ge = static_cast<double>(sorted_null.end() - it);
    return (1.0 + ge) / (static_cast<double>(sorted_null.size()) + 1.0);
}

// Mean of the t largest entries of the panel; drives the data-dependent
// grid cap.
double top_t_mean(const std::vector<double>& values, std::size_t t) {
    std::vector<double> v = values;
    std::nth_element(v.begin(), v.end() - static_cast<std::ptrdiff_t>(t),
                     v.end());
    double acc = 0.0;
    for (std::size_t k = v.size() - t; k < v.size(); ++k) acc += v[k];
    return acc / static_cast<double>(t);
}

struct MeanHcEval {
    double statistic = 0.0;
    std::vector<HcPoint> per_q;
};

// Higher criticism over subject means on the grid {j/k_n : 1 <= j <= J},
// J = ceil(k_n * cap_q), with exceedance probabilities w_q estimated from a
// sorted pool of standardized null means. The cap can be enormous for
// heavy-tailed data, so instead of sweeping every j we evaluate a candidate
// set that contains the maximizer whenever the statistic is positive: within
// a run of constant exceedance count N >= 1 the deviation V is decreasing in
// w_q, hence maximized at the run's last grid point, and past the largest
// subject mean V <= 0 with its supremum at the cap. A dense low range is
// swept too so near-zero maxima are located accurately.
MeanHcEval mean_hc_eval(const std::vector<double>& sorted_means, std::size_t n,
                        std::size_t t, int k_n, double cap_q,
                        const std::vector<double>& pool, bool collect) {
    const double nd = static_cast<double>(n);
    const double ln_n = std::log(nd);
    const double td = static_cast<double>(t);
    const double kd = static_cast<double>(k_n);

    double last_j = std::ceil(kd * cap_q - 1e-12);
    if (!(last_j >= 1.0)) last_j = 1.0;
    if (!(last_j < 1e15)) last_j = 1e15;

    std::vector<double> candidates;
    const double dense_hi = std::min(last_j, 4.0 * kd);
    for (double j = 1.0; j <= dense_hi; j += 1.0) candidates.push_back(j);
    for (auto it = sorted_means.rbegin(); it != sorted_means.rend(); ++it) {
        const double s = *it;
        if (!(s > 0.0)) break;
        const double run_end =
            std::floor(kd * s * s * td / (2.0 * ln_n) + 1e-12);
        if (run_end < 1.0) break;
        candidates.push_back(std::min(run_end, last_j));
    }
    candidates.push_back(last_j);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    const double pool_size = static_cast<double>(pool.size());
    MeanHcEval out;
    out.statistic = -kInfiniteStatistic;
    for (double j : candidates) {
        const double q = j / kd;
        const double z = std::sqrt(2.0 * q * ln_n / td);
        const auto mean_it =
            std::lower_bound(sorted_means.begin(), sorted_means.end(), z);
        const auto count =
            static_cast<long long>(sorted_means.end() - mean_it);
        const auto pool_it = std::lower_bound(pool.begin(), pool.end(), z);
        const double w = static_cast<double>(pool.end() - pool_it) / pool_size;

        const double num = static_cast<double>(count) - nd * w;
        const double den = std::sqrt(nd * w * (1.0 - w));
        double v;
        if (den > 0.0) v = num / den;
        else if (num > 0.0) v = kInfiniteStatistic;
        else if (num < 0.0) v = -kInfiniteStatistic;
        else v = 0.0;

        out.statistic = std::max(out.statistic, v);
        if (collect) out.per_q.push_back({q, z, count, w, v});
    }
    return out;
}

struct PanelSummary {
    std::vector<double> std_means;  // sorted ascending
    double cap_q = 0.0;
};

PanelSummary summarize_panel(const std::vector<double>& values, std::size_t n,
                             std::size_t t, double mu0, double sigma0) {
    PanelSummary s;
    s.std_means.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < t; ++j) acc += values[i * t + j];
        s.std_means[i] = (acc / static_cast<double>(t) - mu0) / sigma0;
    }
    std::sort(s.std_means.begin(), s.std_means.end());
    const double z_m = (top_t_mean(values, t) - mu0) / sigma0;
    s.cap_q = z_m * z_m * static_cast<double>(t) /
              (2.0 * std::log(static_cast<double>(n)));
    return s;
}

}  // namespace

double OracleNullSpec::sample(Rng& rng) const {
    switch (family) {
        case OracleFamily::Normal:
            return mu0 + sigma0 * rng.normal();
        case OracleFamily::Uniform:
            return mu0 + sigma0 * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
        case OracleFamily::Exponential:
            return mu0 + sigma0 * (rng.exponential(1.0) - 1.0);
        case OracleFamily::Cauchy:
            return rng.cauchy(mu0, sigma0);
    }
    throw std::invalid_argument("unknown oracle family");
}

OracleNullSpec oracle_normal() { return {OracleFamily::Normal, 0.0, 1.0}; }

OracleNullSpec oracle_uniform() {
    return {OracleFamily::Uniform, 0.5, std::sqrt(1.0 / 12.0)};
}

OracleNullSpec oracle_exponential() {
    return {OracleFamily::Exponential, 2.0 / 3.0, 2.0 / 3.0};
}

OracleNullSpec oracle_cauchy() { return {OracleFamily::Cauchy, 0.0, 1.0}; }

DistHcCalibration calibrate_dist_hc(const OracleNullSpec& spec, std::size_t n,
                                    std::size_t t, int k_n, std::size_t mc,
                                    RngSeed seed) {
    if (n < 2) throw std::invalid_argument("calibrate_dist_hc: need n >= 2");
    if (t < 1) throw std::invalid_argument("calibrate_dist_hc: need t >= 1");
    if (mc < 1000)
        throw std::invalid_argument("calibrate_dist_hc: need mc >= 1000");
    if (!(spec.sigma0 > 0.0))
        throw std::invalid_argument("calibrate_dist_hc: sigma0 must be > 0");
    if (k_n <= 0) k_n = default_k_n(n);

    DistHcCalibration cal;
    cal.spec = spec;
    cal.n = n;
    cal.t = t;
    cal.k_n = k_n;
    cal.mc = mc;
    cal.seed = seed;

    cal.pooled_std_means.resize(mc * n);
    parallel_for(mc, [&](std::size_t r) {
        Rng rng = Rng::derive(seed, 0x6470, r);
        std::vector<double> values(n * t);
        for (double& v : values) v = spec.sample(rng);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < t; ++j) acc += values[i * t + j];
            cal.pooled_std_means[r * n + i] =
                (acc / static_cast<double>(t) - spec.mu0) / spec.sigma0;
        }
    });
    std::sort(cal.pooled_std_means.begin(), cal.pooled_std_means.end());

    cal.null_stats.resize(mc);
    parallel_for(mc, [&](std::size_t r) {
        Rng rng = Rng::derive(seed, 0x6473, r);
        std::vector<double> values(n * t);
        for (double& v : values) v = spec.sample(rng);
        const PanelSummary s =
            summarize_panel(values, n, t, spec.mu0, spec.sigma0);
        cal.null_stats[r] = mean_hc_eval(s.std_means, n, t, k_n, s.cap_q,
                                         cal.pooled_std_means, false)
                                .statistic;
    });
    std::sort(cal.null_stats.begin(), cal.null_stats.end());
    return cal;
}

TestResult dist_aware_hc(const ObservationMatrix& m,
                         const DistHcCalibration& calibration) {
    if (m.n() != calibration.n || m.t() != calibration.t)
        throw std::invalid_argument(
            "dist_aware_hc: calibration shape does not match data");
    const PanelSummary s = summarize_panel(
        m.values(), m.n(), m.t(), calibration.spec.mu0, calibration.spec.sigma0);
    MeanHcEval eval = mean_hc_eval(s.std_means, m.n(), m.t(), calibration.k_n,
                                   s.cap_q, calibration.pooled_std_means, true);

    TestResult res;
    res.profile.per_q = std::move(eval.per_q);
    res.profile.statistic = eval.statistic;
    res.p_value = add_one_p(eval.statistic, calibration.null_stats);
    res.method = Method::DistHc;
    res.seed = calibration.seed;
    res.calibration_samples = calibration.mc;
    return res;
}

TestResult dist_aware_hc(const ObservationMatrix& m, const OracleNullSpec& spec,
                         int k_n, std::size_t mc, RngSeed seed) {
    return dist_aware_hc(m, calibrate_dist_hc(spec, m.n(), m.t(), k_n, mc, seed));
}

double friedman_statistic(const RankMatrix& ranks) {
    const double nd = static_cast<double>(ranks.n);
    const double td = static_cast<double>(ranks.t);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < ranks.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < ranks.t; ++j) s += ranks.at(i, j);
        sum_sq += s * s;
    }
    return 12.0 / (td * nd * (nd + 1.0)) * sum_sq - 3.0 * td * (nd + 1.0);
}

TestResult friedman_test(const ObservationMatrix& m, std::size_t mc,
                         RngSeed seed) {
    if (mc < 99) throw std::invalid_argument("friedman_test: need mc >= 99");
    const RankMatrix ranks =
        compute_ranks(m, TiePolicy::RandomTies, sub_seed(seed, 0x6672, 0));
    const double q_obs = friedman_statistic(ranks);

    const std::size_t n = m.n();
    const std::size_t t = m.t();
    std::vector<double> null_q(mc);
    parallel_for(mc, [&](std::size_t r) {
        Rng rng = Rng::derive(seed, 0x6671, r);
        std::vector<std::size_t> perm(n);
        std::vector<double> sums(n, 0.0);
        for (std::size_t j = 0; j < t; ++j) {
            for (std::size_t i = 0; i < n; ++i) perm[i] = i;
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
            for (std::size_t i = 0; i < n; ++i)
                sums[perm[i]] += static_cast<double>(i + 1);
        }
        const double nd = static_cast<double>(n);
        const double td = static_cast<double>(t);
        double sum_sq = 0.0;
        for (double s : sums) sum_sq += s * s;
        null_q[r] = 12.0 / (td * nd * (nd + 1.0)) * sum_sq - 3.0 * td * (nd + 1.0);
    });
    std::sort(null_q.begin(), null_q.end());

    TestResult res;
    res.profile.statistic = q_obs;
    res.p_value = add_one_p(q_obs, null_q);
    res.method = Method::Friedman;
    res.seed = seed;
    res.calibration_samples = mc;
    return res;
}

TestResult raw_permutation_hc(const ObservationMatrix& m, int k_n, std::size_t B,
                              RngSeed seed) {
    if (B < 99) throw std::invalid_argument("raw_permutation_hc: need B >= 99");
    const std::size_t n = m.n();
    const std::size_t t = m.t();
    if (k_n <= 0) k_n = default_k_n(n);

    const std::vector<double>& values = m.values();
    double mu = 0.0;
    for (double v : values) mu += v;
    mu /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mu) * (v - mu);
    var /= static_cast<double>(values.size());
    if (!(var > 0.0))
        throw std::invalid_argument("raw_permutation_hc: constant data");
    const double sigma = std::sqrt(var);

    // Grand moments and the top-t mean are multisets of the column entries,
    // so they are identical across column permutations: the grid is shared
    // by the observed panel and every permuted panel.
    const PanelSummary obs = summarize_panel(values, n, t, mu, sigma);

    const auto permuted_std_means = [&](Rng& rng, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        std::vector<std::size_t> perm(n);
        for (std::size_t j = 0; j < t; ++j) {
            for (std::size_t i = 0; i < n; ++i) perm[i] = i;
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
            for (std::size_t i = 0; i < n; ++i)
                out[i] += values[perm[i] * t + j];
        }
        for (double& v : out)
            v = (v / static_cast<double>(t) - mu) / sigma;
    };

    std::vector<double> pool(B * n);
    parallel_for(B, [&](std::size_t b) {
        Rng rng = Rng::derive(seed, 0x7031, b);
        std::vector<double> means(n);
        permuted_std_means(rng, means);
        std::copy(means.begin(), means.end(), pool.begin() + b * n);
    });
    std::sort(pool.begin(), pool.end());

    MeanHcEval eval =
        mean_hc_eval(obs.std_means, n, t, k_n, obs.cap_q, pool, true);

    std::vector<double> null_stats(B);
    parallel_for(B, [&](std::size_t b) {
        Rng rng = Rng::derive(seed, 0x7032, b);
        std::vector<double> means(n);
        permuted_std_means(rng, means);
        std::sort(means.begin(), means.end());
        null_stats[b] =
            mean_hc_eval(means, n, t, k_n, obs.cap_q, pool, false).statistic;
    });
    std::sort(null_stats.begin(), null_stats.end());

    TestResult res;
    res.profile.per_q = std::move(eval.per_q);
    res.profile.statistic = eval.statistic;
    res.p_value = add_one_p(eval.statistic, null_stats);
    res.method = Method::PermHc;
    res.seed = seed;
    res.calibration_samples = B;
    return res;
}

}  // namespace rankhc
