#pragma once

#include <functional>
#include <span>
#include <string>

#include "rankhc/rng.hpp"

namespace rankhc::theory {

// Standard normal CDF.
double normal_cdf(double x);

// Heteroskedastic normal-location detection boundary, four-branch piecewise
// form; continuous across the branch seams.
double rho(double beta, double sigma);

// Limiting rank-transform heteroskedasticity of a Gaussian-convolution
// anomaly: xi_sigma^2 = 12 (E[Phi(sigma Z)^2] - 1/4).
double xi_sigma(double sigma);

// Rank-test boundary in the convolution model:
// sqrt(pi (sigma^2+1)/6) * rho(beta, xi_sigma).
double rho_tilde(double beta, double sigma);

enum class ExpFamily { Uniform, Exponential, Normal };

// Rank-vs-oracle inflation factor in the one-parameter exponential family.
double upsilon0_closed_form(ExpFamily family);

// Generic route: Upsilon0 = (sqrt(3) E[max(Z1, Z2)])^{-1} with Z the
// standardized base variable, evaluated by adaptive quadrature of
// 2 x f(x) F(x) over [lo, hi].
double upsilon0_numeric(const std::function<double(double)>& pdf,
                        const std::function<double(double)>& cdf, double mu0,
                        double sigma0, double lo, double hi);

// Monte-Carlo route from samples of the base distribution.
double upsilon0_mc(std::span<const double> samples);

enum class ConvolutionG { PointMass, Triangular };

inline double g_ess_sup(ConvolutionG) { return 1.0; }
inline double g_mean(ConvolutionG g) {
    return g == ConvolutionG::PointMass ? 1.0 : 0.5;
}

// tau threshold above which the rank test is asymptotically powerful in the
// convolution model. Throws when rho(beta, sigma) = 0 (the oracle boundary
// is zero and the ratio is undefined).
double zeta_g(double beta, double sigma, ConvolutionG g);

enum class SignalFamily {
    NormalShift,
    ExponentialRate,
    UniformTilt,
    ConvolutionNormal,
    ConvolutionTriangular,
    CauchyShift,
};

// Signal parameter theta for a target standardized strength tau, using the
// per-family scaling that keeps tau comparable across settings.
// `sigma` is the convolution component deviation (ignored elsewhere).
double theta_tau(SignalFamily family, double tau, double beta, std::size_t n,
                 std::size_t t, double sigma = 1.0);

struct AnomalyCharacteristics {
    double mu = 0.0;        // rank-signal magnitude, |mu| <= sqrt(3)
    double sigma_sq = 1.0;  // rank-signal heteroskedasticity, in [0, 12]
    double e_u = 0.5;       // E[U]
    double e_u2 = 1.0 / 3;  // E[U^2]
};

AnomalyCharacteristics characteristics_from_moments(double e_u, double e_u2);

// Monte-Carlo over independent triples (X, Y1, Y2): X anomalous, Y null.
AnomalyCharacteristics anomaly_characteristics(
    const std::function<double(Rng&)>& null_sampler,
    const std::function<double(Rng&)>& anomalous_sampler, std::size_t mc,
    RngSeed seed);

struct BoundarySystemResult {
    bool holds = false;
    double lhs = 0.0;     // 1 - beta - (sqrt(q) - sqrt(r))^2 / gamma^2
    double rhs_i = 0.0;   // (1 - q) / 2
    double rhs_ii = 0.0;  // 0
};

BoundarySystemResult check_boundary_system(double gamma, double beta, double r,
                                           double q);

// Smallest r (within tol) for which some q in (0, 1] satisfies the system;
// brute-force consistency check against rho.
double boundary_system_infimum(double gamma, double beta, double r_max = 2.0,
                               double tol = 1e-4);

}  // namespace rankhc::theory
