// Dictionary and run comparison: signed-permutation-invariant dictionary
// distance (optimal atom matching), reconstruction error, and consensus
// disagreement between node estimates.
#pragma once

#include <vector>

#include "ddl/dict_update.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct AtomMatching {
    std::vector<Index> permutation;  // atom k of D1 pairs with atom permutation[k] of D2
    std::vector<int> signs;          // sign making each matched inner product nonnegative
    Scalar mean_abs_correlation = 0.0;
    Scalar total_score = 0.0;  // sum of |d1_k . d2_perm(k)|
};

// Maximizes sum_k |d1_k . d2_perm(k)| over permutations via optimal
// assignment on the |D1^T D2| score matrix (greedy above 512 atoms).
AtomMatching match_atoms(const Dictionary& d1, const Dictionary& d2);

// After optimal matching: (1/K) sum_k ||d1_k - s_k d2_perm(k)||_2. Zero iff
// the dictionaries agree up to signed column permutation.
Scalar dictionary_distance(const Dictionary& d1, const Dictionary& d2);

// ||Y - D X||_F^2 / (p q)
Scalar reconstruction_mse(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                          const Eigen::Ref<const Matrix>& X);

// max over node pairs of ||D_n - D_m||_F / sqrt(K); raw Frobenius, no
// matching (node estimates stay aligned under diffusion). 0 for < 2 inputs.
Scalar consensus_disagreement(const std::vector<Dictionary>& dicts);

// Matched variant, for diagnostics: max pairwise dictionary_distance.
Scalar consensus_disagreement_matched(const std::vector<Dictionary>& dicts);

}  // namespace ddl
