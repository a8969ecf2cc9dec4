#include "rankhc/hc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rankhc {

int default_k_n(std::size_t n) {
    const double ln = std::log(static_cast<double>(n));
    return static_cast<int>(std::ceil(ln * ln));
}

GridSpec make_grid(GridKind kind, std::size_t n, std::size_t t, int k_n) {
    if (n < 2) throw std::invalid_argument("make_grid: need n >= 2");
    if (t < 1) throw std::invalid_argument("make_grid: need t >= 1");
    if (k_n <= 0) k_n = default_k_n(n);

    GridSpec grid;
    grid.kind = kind;
    grid.k_n = k_n;
    grid.n = n;
    grid.t = t;
    if (kind == GridKind::Standard) {
        for (int j = 2; j <= 2 * k_n; j += 2) grid.numerators.push_back(j);
    } else {
        // up to and including the smallest grid point >= 3t/(2 log n)
        const double cap =
            3.0 * static_cast<double>(t) / (2.0 * std::log(static_cast<double>(n)));
        int last = static_cast<int>(std::ceil(cap * k_n - 1e-12));
        if (last < 1) last = 1;
        for (int j = 1; j <= last; ++j) grid.numerators.push_back(j);
    }
    grid.q.reserve(grid.numerators.size());
    for (int j : grid.numerators)
        grid.q.push_back(static_cast<double>(j) / static_cast<double>(k_n));
    return grid;
}

double threshold_z(double q, std::size_t n, std::size_t t) {
    return std::sqrt(2.0 * q * std::log(static_cast<double>(n)) /
                     static_cast<double>(t));
}

std::vector<double> subject_rank_means(const RankMatrix& r) {
    std::vector<double> y(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < r.t; ++j) sum += r.ranks[i * r.t + j];
        y[i] = sum / static_cast<double>(r.t);
    }
    return y;
}

std::vector<long long> threshold_counts(std::span<const double> standardized,
                                        const GridSpec& grid) {
    std::vector<double> sorted(standardized.begin(), standardized.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<long long> counts(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double z = threshold_z(grid.q[k], grid.n, grid.t);
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
        counts[k] = static_cast<long long>(sorted.end() - it);
    }
    return counts;
}

std::vector<long long> exceedance_counts(std::span<const double> rank_means,
                                         const GridSpec& grid) {
    if (rank_means.size() != grid.n)
        throw std::invalid_argument("exceedance_counts: grid built for different n");
    const RankMoments mom = rank_moments(grid.n);
    std::vector<double> standardized(rank_means.size());
    for (std::size_t i = 0; i < rank_means.size(); ++i)
        standardized[i] = (rank_means[i] - mom.rbar) / mom.sigma_r;
    return threshold_counts(standardized, grid);
}

HcProfile hc_statistic(std::span<const long long> counts,
                       std::span<const double> pq, std::size_t n,
                       const GridSpec& grid) {
    if (counts.size() != grid.size() || pq.size() != grid.size())
        throw std::invalid_argument("hc_statistic: vectors not aligned with grid");
    HcProfile profile;
    profile.per_q.reserve(grid.size());
    double best = -kInfiniteStatistic;
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = pq[k];
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("hc_statistic: p_q outside [0,1]");
        const double num = static_cast<double>(counts[k]) - nn * p;
        const double den = std::sqrt(nn * p * (1.0 - p));
        double v;
        if (den == 0.0) {
            v = (num == 0.0) ? 0.0 : (num > 0.0 ? kInfiniteStatistic : -kInfiniteStatistic);
        } else {
            v = num / den;
        }
        best = std::max(best, v);
        profile.per_q.push_back(
            {grid.q[k], threshold_z(grid.q[k], grid.n, grid.t), counts[k], p, v});
    }
    profile.statistic = best;
    return profile;
}

std::string HcProfile::to_json() const {
    nlohmann::json j;
    j["T"] = statistic;
    j["grid"] = nlohmann::json::array();
    j["per_q"] = nlohmann::json::array();
    for (const HcPoint& pt : per_q) {
        j["grid"].push_back(pt.q);
        j["per_q"].push_back(
            {{"q", pt.q}, {"z", pt.z}, {"N", pt.count}, {"p", pt.p}, {"V", pt.v}});
    }
    return j.dump();
}

}  // namespace rankhc
