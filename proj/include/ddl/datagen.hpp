// Synthetic experiment data: sparse-pixel patch dictionaries, Bernoulli x
// Laplace sparse codes, Gaussian measurement noise, and the column partition
// of observations across nodes. The whole synthesis is a pure function of
// SynthesisConfig (seed included); per-node streams are derived as
// derive_seed(master, stream_tag ^ node_id).
#pragma once

#include <cstdint>
#include <vector>

#include "ddl/dict_update.hpp"
#include "ddl/rng.hpp"
#include "ddl/types.hpp"

namespace ddl {

enum class AtomModel { pixel_sparse, dict_sparse };

struct SynthesisConfig {
    int patch_side = 4;  // r; observations live in dimension p = r^2
    int num_atoms = 32;  // K
    std::vector<int> q_per_node = {256, 256, 256, 256};
    Scalar activation_prob = 0.1;
    std::vector<Scalar> sigma = {0.0, 0.0, 0.0, 0.0};  // per-node noise std dev
    std::uint64_t seed = 1;
    AtomModel mode = AtomModel::pixel_sparse;

    int patch_dim() const { return patch_side * patch_side; }
    int n_nodes() const { return static_cast<int>(q_per_node.size()); }
    int total_columns() const;
    void validate() const;
};

// Noise level for a target SNR in dB under this config's code statistics:
// E ||D x||^2 = 2 * activation_prob * K per column (unit atoms, Laplace(0,1)
// amplitudes of variance 2), so sigma^2 = 2 a K / (p * 10^(snr/10)).
Scalar sigma_for_snr_db(const SynthesisConfig& cfg, Scalar snr_db);

// n i.i.d. Laplace(0,1) draws by inverse CDF.
std::vector<Scalar> sample_laplace(SeededRng& rng, Index n);

// pixel_sparse: Bernoulli(activation_prob) mask times Laplace amplitudes,
// normalized, all-zero atoms resampled. dict_sparse: dense Gaussian atoms,
// normalized.
Dictionary generate_true_dictionary(const SynthesisConfig& cfg, SeededRng& rng);

struct NodeData {
    Matrix Y;       // p x q_n noisy observations
    Matrix X_true;  // K x q_n ground-truth codes
    Matrix Z;       // p x q_n noise realization
};

// Per node: X_true with Bernoulli(activation_prob) * Laplace entries and
// Y = D_true X_true + Z, Z ~ N(0, sigma_n^2 I).
std::vector<NodeData> generate_observations(const SynthesisConfig& cfg,
                                            const Dictionary& d_true, SeededRng& rng);

// Disjoint contiguous column blocks; counts must sum to Y's column count.
std::vector<Matrix> partition_columns(const Eigen::Ref<const Matrix>& Y,
                                      const std::vector<int>& counts);

struct SynthesizedExperiment {
    Dictionary d_true;
    std::vector<NodeData> nodes;
};

// Full synthesis from the config alone: dictionary stream plus one stream per
// node, all derived from cfg.seed.
SynthesizedExperiment synthesize(const SynthesisConfig& cfg);

}  // namespace ddl
