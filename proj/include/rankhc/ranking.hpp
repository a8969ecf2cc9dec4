#pragma once

#include <functional>
#include <vector>

#include "rankhc/matrix.hpp"
#include "rankhc/rng.hpp"

namespace rankhc {

enum class TiePolicy { RandomTies, Midrank };

// Per-column ranks. Under random tie-breaking each column is a permutation
// of {1..n}; under midranking tied groups share their group-average rank.
struct RankMatrix {
    std::size_t n = 0;
    std::size_t t = 0;
    TiePolicy policy = TiePolicy::RandomTies;
    std::vector<double> ranks;  // row-major

    double at(std::size_t i, std::size_t j) const { return ranks[i * t + j]; }
};

// Random tie-breaking is a uniform shuffle within each tied group, which is
// equal in law to ranking after an independent vanishing perturbation.
RankMatrix compute_ranks(const ObservationMatrix& m, TiePolicy policy,
                         RngSeed seed);

// Permute each column independently by a uniform permutation of [n].
RankMatrix column_permute(const RankMatrix& r, RngSeed seed);

// Per-column null CDF evaluator. `atom_mass(x) > 0` marks atoms of the null
// distribution; those map to a randomized uniform draw.
struct NullCdf {
    std::function<double(double)> cdf;
    std::function<double(double)> atom_mass;  // optional, may be empty
};

std::vector<double> null_cdf_transform(const ObservationMatrix& m,
                                       const std::vector<NullCdf>& null_cdfs,
                                       RngSeed seed);

}  // namespace rankhc
