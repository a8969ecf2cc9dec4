#pragma once

#include <span>
#include <string>
#include <vector>

#include "rankhc/calibration.hpp"
#include "rankhc/comparators.hpp"
#include "rankhc/matrix.hpp"
#include "rankhc/theory.hpp"

namespace rankhc::simgen {

using theory::SignalFamily;

SignalFamily parse_family(const std::string& name);
const char* family_name(SignalFamily family);

// Sparsity exponent giving exactly `s` anomalous subjects out of n.
double beta_for_count(std::size_t n, std::size_t s);

// One simulation setting: the first `anomalous()` subjects draw from the
// signal distribution, the rest from the null.
struct SignalSpec {
    SignalFamily setting = SignalFamily::NormalShift;
    double tau = 0.0;
    double beta = 0.75;
    std::size_t n = 0;
    std::size_t t = 0;
    double sigma = 1.0;  // convolution component deviation

    std::size_t anomalous() const;
    double theta() const;
};

double sample_null(SignalFamily family, double sigma, Rng& rng);
double sample_anomalous(SignalFamily family, double theta, double sigma,
                        Rng& rng);

// Quantile of the tilted-uniform family F_theta(x) = (e^{theta x} - 1) /
// (e^theta - 1); series expansion near theta = 0.
double uniform_tilt_quantile(double u, double theta);

ObservationMatrix generate(const SignalSpec& spec, RngSeed seed);

// Oracle null description matching a setting's null columns.
OracleNullSpec oracle_for(SignalFamily family);

struct PowerPoint {
    double tau = 0.0;
    std::size_t rejections = 0;
    std::size_t trials = 0;
    double power = 0.0;
    double ci_lo = 0.0;  // 95% Wilson interval
    double ci_hi = 1.0;
};

struct PowerCurve {
    std::string label;
    SignalFamily setting = SignalFamily::NormalShift;
    std::size_t n = 0;
    std::size_t t = 0;
    std::size_t s = 0;
    double alpha = 0.05;
    RngSeed seed;
    std::vector<PowerPoint> points;
};

// Methods to run per simulated dataset; a null pointer or zero count
// disables a method. All enabled methods see the same datasets, so curves
// are paired across methods.
struct MethodSet {
    const NullTable* rank_table = nullptr;
    const DistHcCalibration* dist = nullptr;
    std::size_t perm_b = 0;
    std::size_t friedman_mc = 0;
};

std::vector<PowerCurve> power_experiment(const SignalSpec& base,
                                         std::span<const double> taus,
                                         double alpha, std::size_t trials,
                                         const MethodSet& methods, RngSeed seed);

// Rank-test power across grid resolutions; identical data seeds per k_n so
// the curves are directly comparable.
std::vector<PowerCurve> grid_experiment(const SignalSpec& base,
                                        std::span<const double> taus,
                                        double alpha, std::size_t trials,
                                        std::span<const int> k_n_list,
                                        std::size_t mc_pq, std::size_t mc_t,
                                        RngSeed seed);

// Rank-test power across stream lengths at a fixed anomaly count.
std::vector<PowerCurve> stream_length_experiment(
    SignalFamily setting, std::size_t n, std::size_t s,
    std::span<const double> taus, std::span<const std::size_t> t_list,
    double alpha, std::size_t trials, std::size_t mc_pq, std::size_t mc_t,
    RngSeed seed);

// Degenerate two-column construction whose exceedance indicators are
// perfectly correlated across an entire block of subjects. The only
// randomness is a single fair coin choosing between two data matrices, so
// the indicator moments can be enumerated exactly.
struct TwoOutcomeFixture {
    std::size_t n = 0;
    std::size_t s = 0;
    std::vector<double> x1;   // row-major n x 2
    std::vector<double> x2;
    double q = 0.0;           // grid value whose threshold is z_q below
    double z_q = 0.0;         // rank-mean threshold (2n - s) / 2
    double sum_var = 0.0;     // sum of indicator variances, exact
    double sum_cov = 0.0;     // sum of pairwise indicator covariances, exact
    bool identity_holds = false;  // sum_cov == (s - 2) * sum_var
};

TwoOutcomeFixture two_outcome_fixture(std::size_t n, std::size_t s);

void write_power_csv(const std::vector<PowerCurve>& curves,
                     const std::string& path);

// Reproducibility manifest: seeds, spec, counts.
std::string power_manifest_json(const std::vector<PowerCurve>& curves,
                                const SignalSpec& base,
                                std::span<const double> taus,
                                std::size_t trials, RngSeed seed);

}  // namespace rankhc::simgen
