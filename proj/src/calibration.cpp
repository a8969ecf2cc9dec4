#include "rankhc/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "rankhc/parallel.hpp"
#include "sha256.hpp"

namespace rankhc {

namespace {

std::atomic<double> g_budget{1e12};

RngSeed sub_seed(RngSeed seed, std::uint64_t k1, std::uint64_t k2 = 0) {
    return RngSeed{mix_keys(mix_keys(seed.value, k1), k2)};
}

// Sorted counts of standardized means against the grid thresholds.
std::vector<long long> panel_counts(std::vector<double> standardized,
                                    const GridSpec& grid) {
    std::sort(standardized.begin(), standardized.end());
    std::vector<long long> counts(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double z = threshold_z(grid.q[k], grid.n, grid.t);
        const auto it = std::lower_bound(standardized.begin(), standardized.end(), z);
        counts[k] = static_cast<long long>(standardized.end() - it);
    }
    return counts;
}

void check_shape(const ObservationMatrix& m, const NullTable& table) {
    if (m.n() != table.n || m.t() != table.t) {
        throw std::invalid_argument(
            "null table shape (" + std::to_string(table.n) + "," +
            std::to_string(table.t) + ") does not match data (" +
            std::to_string(m.n()) + "," + std::to_string(m.t()) + ")");
    }
}

std::vector<double> standardized_means(const RankMatrix& r) {
    const RankMoments mom = rank_moments(r.n);
    std::vector<double> y = subject_rank_means(r);
    for (double& v : y) v = (v - mom.rbar) / mom.sigma_r;
    return y;
}

nlohmann::json table_payload(const NullTable& table) {
    nlohmann::json j;
    j["version"] = table.version;
    j["n"] = table.n;
    j["t"] = table.t;
    j["grid"] = {{"kind", table.grid.kind == GridKind::Standard ? "standard" : "extended"},
                 {"k_n", table.grid.k_n},
                 {"numerators", table.grid.numerators}};
    j["pq"] = table.pq;
    // JSON has no infinity literal; infinite statistics are kept as strings.
    nlohmann::json t_null = nlohmann::json::array();
    for (double v : table.t_null) {
        if (std::isinf(v)) {
            t_null.push_back(v > 0 ? "inf" : "-inf");
        } else {
            t_null.push_back(v);
        }
    }
    j["t_null"] = std::move(t_null);
    j["seed"] = table.seed.value;
    j["mc_pq"] = table.mc_pq;
    j["mc_t"] = table.mc_t;
    return j;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::RandomTiesMc: return "random-ties-mc";
        case Method::MidrankPermutation: return "midrank-permutation";
        case Method::MidrankNaive: return "midrank-naive";
        case Method::DistHc: return "dist-hc";
        case Method::Friedman: return "friedman";
        case Method::PermHc: return "perm-hc";
    }
    return "unknown";
}

std::string TestResult::to_json() const {
    nlohmann::json j = nlohmann::json::parse(profile.to_json());
    j["p_value"] = p_value;
    j["method"] = method_name(method);
    j["seed"] = seed.value;
    j["calibration_samples"] = calibration_samples;
    if (subject_p) j["subject_p"] = *subject_p;
    return j.dump();
}

void set_tabulation_budget(double cells) { g_budget.store(cells); }
double tabulation_budget() { return g_budget.load(); }

std::vector<double> null_standardized_means(std::size_t n, std::size_t t, Rng& rng) {
    std::vector<double> sums(n, 0.0);
    std::vector<std::uint32_t> perm(n);
    for (std::size_t j = 0; j < t; ++j) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
        for (std::size_t k = n; k > 1; --k) {
            const std::size_t pick = rng.uniform_below(k);
            std::swap(perm[k - 1], perm[pick]);
        }
        for (std::size_t i = 0; i < n; ++i)
            sums[perm[i]] += static_cast<double>(i + 1);
    }
    const RankMoments mom = rank_moments(n);
    for (double& s : sums) s = (s / static_cast<double>(t) - mom.rbar) / mom.sigma_r;
    return sums;
}

NullTable tabulate_null(std::size_t n, std::size_t t, const GridSpec& grid,
                        std::size_t mc_pq, std::size_t mc_t, RngSeed seed) {
    if (mc_pq < 100 || mc_t < 100)
        throw std::invalid_argument("tabulate_null: need mc_pq, mc_t >= 100");
    if (grid.n != n || grid.t != t)
        throw std::invalid_argument("tabulate_null: grid built for different shape");
    const double cells = static_cast<double>(n) * static_cast<double>(t) *
                         static_cast<double>(mc_pq + mc_t);
    if (cells > tabulation_budget())
        throw std::runtime_error("tabulate_null: n*t*mc exceeds the memory budget");

    NullTable table;
    table.n = n;
    table.t = t;
    table.grid = grid;
    table.seed = seed;
    table.mc_pq = mc_pq;
    table.mc_t = mc_t;

    // Phase 1: p_q pooled over all n subjects of each replicate.
    std::vector<std::atomic<long long>> totals(grid.size());
    parallel_for(mc_pq, [&](std::size_t r) {
        Rng rng = Rng::derive(seed, 1, r);
        const auto counts = panel_counts(null_standardized_means(n, t, rng), grid);
        for (std::size_t k = 0; k < counts.size(); ++k)
            totals[k].fetch_add(counts[k], std::memory_order_relaxed);
    });
    table.pq.resize(grid.size());
    const double denom = static_cast<double>(mc_pq) * static_cast<double>(n);
    for (std::size_t k = 0; k < grid.size(); ++k)
        table.pq[k] = static_cast<double>(totals[k].load()) / denom;
    // Isotonic clamp: the true p_q is nonincreasing in q.
    for (std::size_t k = 1; k < table.pq.size(); ++k)
        table.pq[k] = std::min(table.pq[k], table.pq[k - 1]);

    // Phase 2: fresh panels, T against the frozen p_q.
    table.t_null.resize(mc_t);
    parallel_for(mc_t, [&](std::size_t r) {
        Rng rng = Rng::derive(seed, 2, r);
        const auto counts = panel_counts(null_standardized_means(n, t, rng), grid);
        table.t_null[r] = hc_statistic(counts, table.pq, n, grid).statistic;
    });
    std::sort(table.t_null.begin(), table.t_null.end());
    return table;
}

double p_value_mc(double t_obs, const NullTable& table) {
    const auto it =
        std::lower_bound(table.t_null.begin(), table.t_null.end(), t_obs);
    const auto exceed = static_cast<double>(table.t_null.end() - it);
    return (1.0 + exceed) / (static_cast<double>(table.mc_t) + 1.0);
}

std::vector<double> null_rank_mean_pool(std::size_t n, std::size_t t,
                                        std::size_t samples, RngSeed seed) {
    std::vector<double> pool(samples);
    parallel_for(samples, [&](std::size_t s) {
        Rng rng = Rng::derive(seed, 3, s);
        double sum = 0.0;
        for (std::size_t j = 0; j < t; ++j)
            sum += static_cast<double>(rng.uniform_below(n) + 1);
        pool[s] = sum / static_cast<double>(t);
    });
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<double> subject_p_values(std::span<const double> observed_rank_means,
                                     std::span<const double> null_pool) {
    std::vector<double> sorted(null_pool.begin(), null_pool.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> p(observed_rank_means.size());
    const double denom = static_cast<double>(sorted.size()) + 1.0;
    for (std::size_t i = 0; i < observed_rank_means.size(); ++i) {
        const auto it =
            std::lower_bound(sorted.begin(), sorted.end(), observed_rank_means[i]);
        p[i] = (1.0 + static_cast<double>(sorted.end() - it)) / denom;
    }
    return p;
}

namespace {

TestResult table_calibrated_test(const ObservationMatrix& m, const NullTable& table,
                                 RngSeed seed, TiePolicy policy, Method method,
                                 const SubjectOptions& subjects) {
    check_shape(m, table);
    const RankMatrix ranks = compute_ranks(m, policy, seed);
    const std::vector<double> y = subject_rank_means(ranks);
    const auto counts = exceedance_counts(y, table.grid);
    TestResult result;
    result.profile = hc_statistic(counts, table.pq, table.n, table.grid);
    result.p_value = p_value_mc(result.profile.statistic, table);
    result.method = method;
    result.seed = seed;
    result.calibration_samples = table.mc_t;
    if (subjects.enabled) {
        const auto pool =
            null_rank_mean_pool(table.n, table.t, subjects.mc, sub_seed(seed, 0x5350));
        result.subject_p = subject_p_values(y, pool);
    }
    return result;
}

}  // namespace

TestResult test_random_ties(const ObservationMatrix& m, const NullTable& table,
                            RngSeed seed, const SubjectOptions& subjects) {
    return table_calibrated_test(m, table, seed, TiePolicy::RandomTies,
                                 Method::RandomTiesMc, subjects);
}

TestResult test_midrank_naive(const ObservationMatrix& m, const NullTable& table,
                              RngSeed seed, const SubjectOptions& subjects) {
    return table_calibrated_test(m, table, seed, TiePolicy::Midrank,
                                 Method::MidrankNaive, subjects);
}

TestResult test_midrank_permutation(const ObservationMatrix& m,
                                    const GridSpec& grid, std::size_t B,
                                    RngSeed seed, const SubjectOptions& subjects) {
    if (B < 99) throw std::invalid_argument("test_midrank_permutation: need B >= 99");
    if (grid.n != m.n() || grid.t != m.t())
        throw std::invalid_argument("test_midrank_permutation: grid shape mismatch");
    const RankMatrix midranks = compute_ranks(m, TiePolicy::Midrank, seed);

    // One pass over B column permutations: pooled per-subject exceedances for
    // p_hat_q, per-permutation counts for the null law of T.
    std::vector<std::vector<long long>> perm_counts(B);
    std::vector<std::vector<double>> perm_means;
    if (subjects.enabled) perm_means.resize(B);
    parallel_for(B, [&](std::size_t b) {
        const RankMatrix permuted = column_permute(midranks, sub_seed(seed, 0x504d, b));
        std::vector<double> std_means = standardized_means(permuted);
        if (subjects.enabled) perm_means[b] = subject_rank_means(permuted);
        perm_counts[b] = panel_counts(std::move(std_means), grid);
    });

    std::vector<double> pq(grid.size(), 0.0);
    for (const auto& counts : perm_counts)
        for (std::size_t k = 0; k < grid.size(); ++k)
            pq[k] += static_cast<double>(counts[k]);
    const double denom = static_cast<double>(B) * static_cast<double>(m.n());
    for (double& p : pq) p /= denom;
    for (std::size_t k = 1; k < pq.size(); ++k) pq[k] = std::min(pq[k], pq[k - 1]);

    const std::vector<double> y = subject_rank_means(midranks);
    const auto obs_counts = exceedance_counts(y, grid);

    TestResult result;
    result.profile = hc_statistic(obs_counts, pq, m.n(), grid);
    result.method = Method::MidrankPermutation;
    result.seed = seed;
    result.calibration_samples = B;

    long long exceed = 0;
    for (const auto& counts : perm_counts) {
        const double t_perm = hc_statistic(counts, pq, m.n(), grid).statistic;
        if (t_perm >= result.profile.statistic) ++exceed;
    }
    result.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(B) + 1.0);

    if (subjects.enabled) {
        std::vector<double> pool;
        pool.reserve(B * m.n());
        for (const auto& means : perm_means)
            pool.insert(pool.end(), means.begin(), means.end());
        result.subject_p = subject_p_values(y, pool);
    }
    return result;
}

void save_table(const NullTable& table, const std::string& path) {
    nlohmann::json j = table_payload(table);
    j["checksum"] = sha256_hex(j.dump());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_table: cannot open " + path);
    out << j.dump();
}

NullTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_table: corrupted file: " + std::string(e.what()));
    }
    if (!j.contains("version") || j["version"] != kNullTableVersion)
        throw std::runtime_error("load_table: version mismatch");

    NullTable table;
    table.version = j["version"];
    table.n = j["n"];
    table.t = j["t"];
    const GridKind kind =
        j["grid"]["kind"] == "standard" ? GridKind::Standard : GridKind::Extended;
    table.grid = make_grid(kind, table.n, table.t, j["grid"]["k_n"]);
    const std::vector<int> numerators = j["grid"]["numerators"];
    if (numerators != table.grid.numerators)
        throw std::runtime_error("load_table: stored grid does not match its parameters");
    table.pq = j["pq"].get<std::vector<double>>();
    table.t_null.clear();
    for (const auto& v : j["t_null"]) {
        if (v.is_string()) {
            table.t_null.push_back(v == "inf" ? kInfiniteStatistic : -kInfiniteStatistic);
        } else {
            table.t_null.push_back(v.get<double>());
        }
    }
    table.seed = RngSeed{j["seed"].get<std::uint64_t>()};
    table.mc_pq = j["mc_pq"];
    table.mc_t = j["mc_t"];
    if (table.pq.size() != table.grid.size())
        throw std::runtime_error("load_table: pq length does not match grid");
    if (table.t_null.size() != table.mc_t)
        throw std::runtime_error("load_table: t_null length does not match mc_t");

    const std::string stored = j.value("checksum", "");
    if (stored != sha256_hex(table_payload(table).dump()))
        throw std::runtime_error("load_table: checksum mismatch");
    return table;
}

}  // namespace rankhc
