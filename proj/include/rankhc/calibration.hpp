#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankhc/hc.hpp"
#include "rankhc/matrix.hpp"
#include "rankhc/ranking.hpp"

namespace rankhc {

inline constexpr const char* kNullTableVersion = "rankhc-nulltable-1";

// Monte-Carlo null table for panel shape (n, t) and a grid. Depends only on
// (n, t, grid, seed, sample counts), never on data.
struct NullTable {
    std::size_t n = 0;
    std::size_t t = 0;
    GridSpec grid;
    std::vector<double> pq;      // aligned with grid, isotonic in q
    std::vector<double> t_null;  // sorted ascending, length mc_t
    RngSeed seed;
    std::size_t mc_pq = 0;
    std::size_t mc_t = 0;
    std::string version = kNullTableVersion;
};

enum class Method {
    RandomTiesMc,
    MidrankPermutation,
    MidrankNaive,
    DistHc,
    Friedman,
    PermHc,
};

const char* method_name(Method m);

struct TestResult {
    HcProfile profile;
    double p_value = 1.0;
    Method method = Method::RandomTiesMc;
    std::optional<std::vector<double>> subject_p;
    RngSeed seed;
    std::size_t calibration_samples = 0;

    bool reject(double alpha) const { return p_value <= alpha; }
    std::string to_json() const;
};

// Memory guard for tabulation, in matrix cells simulated (n * t * replicates).
void set_tabulation_budget(double cells);
double tabulation_budget();

// Two-phase tabulation: p_q is frozen from the first mc_pq panels (pooled
// over all n subjects, each marginally null), then mc_t fresh panels give
// the null law of T against exactly those p_q.
NullTable tabulate_null(std::size_t n, std::size_t t, const GridSpec& grid,
                        std::size_t mc_pq, std::size_t mc_t, RngSeed seed);

// Add-one estimator: (1 + #{null >= t_obs}) / (mc_t + 1).
double p_value_mc(double t_obs, const NullTable& table);

struct SubjectOptions {
    bool enabled = false;
    std::size_t mc = 20000;  // null rank-mean pool size for table-based methods
};

TestResult test_random_ties(const ObservationMatrix& m, const NullTable& table,
                            RngSeed seed, const SubjectOptions& subjects = {});

TestResult test_midrank_permutation(const ObservationMatrix& m,
                                    const GridSpec& grid, std::size_t B,
                                    RngSeed seed,
                                    const SubjectOptions& subjects = {});

// Midranks calibrated against the random-tie table. Approximate: no
// calibration guarantee under heavy ties, flagged via its method tag.
TestResult test_midrank_naive(const ObservationMatrix& m, const NullTable& table,
                              RngSeed seed, const SubjectOptions& subjects = {});

// Pool of null subject rank means (marginal law: mean of t iid uniform
// ranks on {1..n}).
std::vector<double> null_rank_mean_pool(std::size_t n, std::size_t t,
                                        std::size_t samples, RngSeed seed);

// p_i = P_H0(Y_1 >= Y_i) from a null pool, add-one corrected.
std::vector<double> subject_p_values(std::span<const double> observed_rank_means,
                                     std::span<const double> null_pool);

void save_table(const NullTable& table, const std::string& path);
NullTable load_table(const std::string& path);

// Convenience: standardized null subject rank means of one uniform panel.
std::vector<double> null_standardized_means(std::size_t n, std::size_t t, Rng& rng);

}  // namespace rankhc
