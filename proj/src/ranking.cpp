#include "rankhc/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace rankhc {

namespace {

// Fisher-Yates over an index range.
template <typename It>
void shuffle_range(It first, It last, Rng& rng) {
    const auto len = static_cast<std::size_t>(last - first);
    for (std::size_t k = len; k > 1; --k) {
        const std::size_t pick = rng.uniform_below(k);
        std::swap(first[k - 1], first[pick]);
    }
}

}  // namespace

RankMatrix compute_ranks(const ObservationMatrix& m, TiePolicy policy,
                         RngSeed seed) {
    const std::size_t n = m.n();
    const std::size_t t = m.t();
    RankMatrix out;
    out.n = n;
    out.t = t;
    out.policy = policy;
    out.ranks.resize(n * t);

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < t; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return m.at(a, j) < m.at(b, j);
        });
        Rng rng = Rng::derive(seed, 0x7261, j);  // per-column stream
        std::size_t g = 0;
        while (g < n) {
            std::size_t end = g + 1;
            while (end < n && m.at(order[end], j) == m.at(order[g], j)) ++end;
            if (policy == TiePolicy::Midrank) {
                // group occupies integer ranks g+1 .. end
                const double mid = 0.5 * static_cast<double>(g + 1 + end);
                for (std::size_t k = g; k < end; ++k)
                    out.ranks[order[k] * t + j] = mid;
            } else {
                if (end - g > 1) shuffle_range(order.begin() + g, order.begin() + end, rng);
                for (std::size_t k = g; k < end; ++k)
                    out.ranks[order[k] * t + j] = static_cast<double>(k + 1);
            }
            g = end;
        }
    }
    return out;
}

RankMatrix column_permute(const RankMatrix& r, RngSeed seed) {
    RankMatrix out = r;
    std::vector<std::size_t> perm(r.n);
    for (std::size_t j = 0; j < r.t; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng = Rng::derive(seed, 0x7065, j);
        shuffle_range(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < r.n; ++i)
            out.ranks[perm[i] * r.t + j] = r.ranks[i * r.t + j];
    }
    return out;
}

std::vector<double> null_cdf_transform(const ObservationMatrix& m,
                                       const std::vector<NullCdf>& null_cdfs,
                                       RngSeed seed) {
    if (null_cdfs.size() != m.t())
        throw std::invalid_argument("null_cdf_transform: need one CDF per column");
    std::vector<double> u(m.n() * m.t());
    for (std::size_t j = 0; j < m.t(); ++j) {
        const NullCdf& f = null_cdfs[j];
        Rng rng = Rng::derive(seed, 0x756e, j);
        for (std::size_t i = 0; i < m.n(); ++i) {
            const double x = m.at(i, j);
            double v;
            if (f.atom_mass && f.atom_mass(x) > 0.0) {
                // atom of the null law: randomized uniform on the jump
                const double w = 2.0 * rng.uniform() - 1.0;
                const double mass = f.atom_mass(x);
                v = f.cdf(x) - mass * (1.0 - w) / 2.0;
            } else {
                v = f.cdf(x);
            }
            if (v < 0.0 || v > 1.0)
                throw std::runtime_error("null_cdf_transform: CDF value outside [0,1]");
            u[i * m.t() + j] = v;
        }
    }
    return u;
}

}  // namespace rankhc
