#include "rankhc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rankhc/parallel.hpp"

namespace rankhc::theory {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.5 && beta < 1.0))
        throw std::invalid_argument("beta must lie in (0.5, 1)");
}

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_impl(const std::function<double(double)>& f, double a,
                             double b, double fa, double fm, double fb,
                             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(f, a, b, fa, fm, fb);
    const double r =
        adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, 48);
    if (!std::isfinite(r)) throw std::runtime_error("quadrature did not converge");
    return r;
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double rho(double beta, double sigma) {
    check_beta(beta);
    if (sigma < 0.0) throw std::invalid_argument("rho: sigma must be >= 0");
    const double root2 = std::numbers::sqrt2;
    if (sigma < root2) {
        if (beta <= 1.0 - sigma * sigma / 4.0)
            return (2.0 - sigma * sigma) * (beta - 0.5);
        const double v = 1.0 - sigma * std::sqrt(1.0 - beta);
        return v * v;
    }
    if (beta <= 1.0 - 1.0 / (sigma * sigma)) return 0.0;
    const double v = 1.0 - sigma * std::sqrt(1.0 - beta);
    return v * v;
}

double xi_sigma(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("xi_sigma: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    const auto integrand = [sigma](double z) {
        const double phi = normal_cdf(sigma * z);
        return phi * phi * normal_pdf(z);
    };
    const double e_phi_sq = adaptive_simpson(integrand, -12.0, 12.0, 1e-13);
    const double xi_sq = 12.0 * (e_phi_sq - 0.25);
    return std::sqrt(std::max(xi_sq, 0.0));
}

double rho_tilde(double beta, double sigma) {
    return std::sqrt(std::numbers::pi * (sigma * sigma + 1.0) / 6.0) *
           rho(beta, xi_sigma(sigma));
}

double upsilon0_closed_form(ExpFamily family) {
    switch (family) {
        case ExpFamily::Uniform: return 1.0;
        case ExpFamily::Exponential: return 2.0 / std::sqrt(3.0);
        case ExpFamily::Normal: return std::sqrt(std::numbers::pi / 3.0);
    }
    throw std::invalid_argument("unknown exponential-family tag");
}

double upsilon0_numeric(const std::function<double(double)>& pdf,
                        const std::function<double(double)>& cdf, double mu0,
                        double sigma0, double lo, double hi) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("upsilon0: sigma0 must be > 0");
    // E[max(X1, X2)] = 2 * integral of x f(x) F(x)
    const auto integrand = [&](double x) { return x * pdf(x) * cdf(x); };
    const double e_max = 2.0 * adaptive_simpson(integrand, lo, hi, 1e-12);
    const double standardized = (e_max - mu0) / sigma0;
    if (!(standardized > 0.0))
        throw std::runtime_error("upsilon0: nonpositive standardized max moment");
    return 1.0 / (std::sqrt(3.0) * standardized);
}

double upsilon0_mc(std::span<const double> samples) {
    if (samples.size() < 4)
        throw std::invalid_argument("upsilon0_mc: need at least 4 samples");
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(samples.size() - 1);
    if (!(var > 0.0)) throw std::runtime_error("upsilon0_mc: degenerate samples");
    const double sd = std::sqrt(var);

    const std::size_t pairs = samples.size() / 2;
    double e_max = 0.0;
    for (std::size_t i = 0; i < pairs; ++i)
        e_max += std::max(samples[2 * i], samples[2 * i + 1]);
    e_max /= static_cast<double>(pairs);
    const double standardized = (e_max - mean) / sd;
    if (!(standardized > 0.0))
        throw std::runtime_error("upsilon0_mc: nonpositive standardized max moment");
    return 1.0 / (std::sqrt(3.0) * standardized);
}

double zeta_g(double beta, double sigma, ConvolutionG g) {
    const double denom = rho(beta, sigma);
    if (denom == 0.0)
        throw std::domain_error("zeta_g: oracle boundary is zero at this (beta, sigma)");
    const double s = g_ess_sup(g);
    const double mu = g_mean(g);
    return std::sqrt(std::numbers::pi * (sigma * sigma + 1.0) * s * s *
                     rho(beta, xi_sigma(sigma)) / (6.0 * mu * mu * denom));
}

double theta_tau(SignalFamily family, double tau, double beta, std::size_t n,
                 std::size_t t, double sigma) {
    if (tau < 0.0) throw std::invalid_argument("theta_tau: tau must be >= 0");
    const double ln = std::log(static_cast<double>(n));
    const double td = static_cast<double>(t);
    switch (family) {
        case SignalFamily::NormalShift:
            return tau * std::sqrt(2.0 * rho(beta, 1.0) * ln / td);
        case SignalFamily::ExponentialRate: {
            const double sigma0 = 2.0 / 3.0;  // rate 3/2 base
            return tau * std::sqrt(2.0 * rho(beta, 1.0) * ln / (sigma0 * sigma0 * td));
        }
        case SignalFamily::UniformTilt: {
            const double sigma0_sq = 1.0 / 12.0;
            return tau * std::sqrt(2.0 * rho(beta, 1.0) * ln / (sigma0_sq * td));
        }
        case SignalFamily::ConvolutionNormal:
        case SignalFamily::ConvolutionTriangular:
            return tau * std::sqrt(2.0 * rho(beta, sigma) * ln / td);
        case SignalFamily::CauchyShift:
            return tau * std::numbers::pi * std::sqrt(2.0 * rho(beta, 1.0) * ln / (3.0 * td));
    }
    throw std::invalid_argument("theta_tau: unknown signal family");
}

AnomalyCharacteristics characteristics_from_moments(double e_u, double e_u2) {
    AnomalyCharacteristics c;
    c.e_u = e_u;
    c.e_u2 = e_u2;
    c.mu = 2.0 * std::sqrt(3.0) * (e_u - 0.5);
    c.sigma_sq = 12.0 * (e_u2 - e_u * e_u);
    return c;
}

AnomalyCharacteristics anomaly_characteristics(
    const std::function<double(Rng&)>& null_sampler,
    const std::function<double(Rng&)>& anomalous_sampler, std::size_t mc,
    RngSeed seed) {
    if (mc < 10000)
        throw std::invalid_argument("anomaly_characteristics: need mc >= 10^4");
    // Independent triples matching the moment identities:
    // E[U]   = P(X > Y1) + P(X = Y1)/2
    // E[U^2] = P(X > max(Y1, Y2)) + P(X = Y2 > Y1) + P(X = Y1 = Y2)/3
    double acc_u = 0.0;
    double acc_u2 = 0.0;
    for (std::size_t k = 0; k < mc; ++k) {
        Rng rng = Rng::derive(seed, 0x6368, k);
        const double x = anomalous_sampler(rng);
        const double y1 = null_sampler(rng);
        const double y2 = null_sampler(rng);
        if (x > y1) acc_u += 1.0;
        else if (x == y1) acc_u += 0.5;
        if (x > y1 && x > y2) acc_u2 += 1.0;
        else if (x == y2 && x > y1) acc_u2 += 1.0;
        else if (x == y1 && x == y2) acc_u2 += 1.0 / 3.0;
    }
    return characteristics_from_moments(acc_u / static_cast<double>(mc),
                                        acc_u2 / static_cast<double>(mc));
}

BoundarySystemResult check_boundary_system(double gamma, double beta, double r,
                                           double q) {
    if (!(gamma > 0.0)) throw std::invalid_argument("check_boundary_system: gamma > 0");
    check_beta(beta);
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("check_boundary_system: q in (0, 1]");
    if (r < 0.0) throw std::invalid_argument("check_boundary_system: r >= 0");
    BoundarySystemResult res;
    // for q <= r the anomalous exceedance probability tends to one, so the
    // penalty term vanishes: only the (sqrt(q) - sqrt(r))_+ part counts
    const double d = std::max(std::sqrt(q) - std::sqrt(r), 0.0);
    res.lhs = 1.0 - beta - d * d / (gamma * gamma);
    res.rhs_i = (1.0 - q) / 2.0;
    res.rhs_ii = 0.0;
    res.holds = res.lhs > res.rhs_i && res.lhs > res.rhs_ii;
    return res;
}

double boundary_system_infimum(double gamma, double beta, double r_max,
                               double tol) {
    const auto exists_q = [&](double r) {
        // dense sweep plus the two analytically-motivated choices
        constexpr int kSteps = 4096;
        for (int k = 1; k <= kSteps; ++k) {
            const double q = static_cast<double>(k) / kSteps;
            if (check_boundary_system(gamma, beta, r, q).holds) return true;
        }
        const double g2 = gamma * gamma;
        if (g2 != 2.0) {
            const double q = std::min(4.0 * r / ((g2 - 2.0) * (g2 - 2.0)), 1.0);
            if (q > 0.0 && check_boundary_system(gamma, beta, r, q).holds) return true;
        }
        return false;
    };
    if (exists_q(0.0)) return 0.0;
    if (!exists_q(r_max)) return r_max;
    double lo = 0.0;
    double hi = r_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (exists_q(mid)) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace rankhc::theory
