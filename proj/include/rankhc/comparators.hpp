#pragma once

#include <vector>

#include "rankhc/calibration.hpp"
#include "rankhc/matrix.hpp"

namespace rankhc {

enum class OracleFamily { Normal, Uniform, Exponential, Cauchy };

// Null-distribution knowledge handed to the distribution-aware comparator.
// For Cauchy the first two moments do not exist; mu0/sigma0 carry the null
// median and scale instead.
struct OracleNullSpec {
    OracleFamily family = OracleFamily::Normal;
    double mu0 = 0.0;
    double sigma0 = 1.0;

    double sample(Rng& rng) const;
};

// Canonical specs for the simulation-study null families.
OracleNullSpec oracle_normal();
OracleNullSpec oracle_uniform();
OracleNullSpec oracle_exponential();  // rate 3/2
OracleNullSpec oracle_cauchy();

// Reusable Monte-Carlo calibration for dist_aware_hc: pooled null subject
// means for w_q plus the null law of the full statistic (each replicate with
// its own data-dependent grid cap). Depends only on (spec, n, t, k_n).
struct DistHcCalibration {
    OracleNullSpec spec;
    std::size_t n = 0;
    std::size_t t = 0;
    int k_n = 0;
    std::size_t mc = 0;
    RngSeed seed;
    std::vector<double> pooled_std_means;  // sorted ascending, size mc*n
    std::vector<double> null_stats;        // sorted ascending, size mc
};

DistHcCalibration calibrate_dist_hc(const OracleNullSpec& spec, std::size_t n,
                                    std::size_t t, int k_n, std::size_t mc,
                                    RngSeed seed);

TestResult dist_aware_hc(const ObservationMatrix& m,
                         const DistHcCalibration& calibration);

TestResult dist_aware_hc(const ObservationMatrix& m, const OracleNullSpec& spec,
                         int k_n, std::size_t mc, RngSeed seed);

// Classical Friedman statistic on column-wise ranks, calibrated by
// Monte-Carlo over uniform permutation panels.
TestResult friedman_test(const ObservationMatrix& m, std::size_t mc, RngSeed seed);

double friedman_statistic(const RankMatrix& ranks);

// Higher criticism on raw subject means with permutation-estimated
// exceedance probabilities; valid only under identical referentials, which
// is the caller's responsibility. Exceedance estimation and calibration use
// disjoint permutation sets.
TestResult raw_permutation_hc(const ObservationMatrix& m, int k_n, std::size_t B,
                              RngSeed seed);

}  // namespace rankhc
