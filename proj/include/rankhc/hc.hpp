#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rankhc/ranking.hpp"

namespace rankhc {

enum class GridKind { Standard, Extended };

// Threshold grid. Points are exact multiples of 1/k_n; the numerators are
// kept so grid identity (used in cache keys) does not depend on float drift.
struct GridSpec {
    GridKind kind = GridKind::Extended;
    int k_n = 0;
    std::size_t n = 0;
    std::size_t t = 0;
    std::vector<int> numerators;
    std::vector<double> q;

    std::size_t size() const { return q.size(); }
    bool same_shape(const GridSpec& other) const {
        return kind == other.kind && k_n == other.k_n && n == other.n &&
               t == other.t;
    }
};

// log(n) is the natural logarithm throughout.
int default_k_n(std::size_t n);

// k_n <= 0 selects the default ceil(log^2 n).
GridSpec make_grid(GridKind kind, std::size_t n, std::size_t t, int k_n = 0);

// Standardized exceedance threshold for grid value q.
double threshold_z(double q, std::size_t n, std::size_t t);

struct RankMoments {
    double rbar;
    double sigma_r;
};

inline RankMoments rank_moments(std::size_t n) {
    const double nn = static_cast<double>(n);
    return {(nn + 1.0) / 2.0, std::sqrt((nn * nn - 1.0) / 12.0)};
}

struct HcPoint {
    double q;
    double z;      // standardized threshold
    long long count;  // N_q
    double p;      // null exceedance probability p_q
    double v;      // standardized deviation V_q
};

struct HcProfile {
    std::vector<HcPoint> per_q;
    double statistic = 0.0;  // T = max_q V_q

    std::string to_json() const;
};

std::vector<double> subject_rank_means(const RankMatrix& r);

// N_q = #{i : (Y_i - Rbar)/sigma_R >= z_q}; closed (>=) threshold.
std::vector<long long> exceedance_counts(std::span<const double> rank_means,
                                         const GridSpec& grid);

// Counts of standardized values >= z_q for each grid point (shared helper
// for calibration pools where the values are already standardized).
std::vector<long long> threshold_counts(std::span<const double> standardized,
                                        const GridSpec& grid);

// p = 0 with a positive count yields an infinite-statistic sentinel: the
// observation is more extreme than anything the null table produced.
HcProfile hc_statistic(std::span<const long long> counts,
                       std::span<const double> pq, std::size_t n,
                       const GridSpec& grid);

inline constexpr double kInfiniteStatistic =
    std::numeric_limits<double>::infinity();

}  // namespace rankhc
