#include "ddl/datagen.hpp"

#include <cmath>
#include <numeric>

namespace ddl {

namespace {
constexpr std::uint64_t kDictStream = 0x44494354;  // "DICT"
constexpr std::uint64_t kNodeStream = 0x4E4F4445;  // "NODE"
}  // namespace

int SynthesisConfig::total_columns() const {
    return std::accumulate(q_per_node.begin(), q_per_node.end(), 0);
}

void SynthesisConfig::validate() const {
    require(patch_side >= 1, "synthesis: patch_side must be >= 1");
    require(num_atoms >= 1, "synthesis: num_atoms must be >= 1");
    require(!q_per_node.empty(), "synthesis: need at least one node");
    for (int q : q_per_node) require(q >= 1, "synthesis: every q_per_node must be >= 1");
    require(activation_prob >= 0.0 && activation_prob <= 1.0,
            "synthesis: activation_prob must lie in [0,1]");
    require(sigma.size() == q_per_node.size(), "synthesis: need one sigma per node");
    for (Scalar s : sigma) require(s >= 0.0, "synthesis: sigma must be nonnegative");
}

Scalar sigma_for_snr_db(const SynthesisConfig& cfg, Scalar snr_db) {
    const Scalar signal_power_per_entry =
        2.0 * cfg.activation_prob * cfg.num_atoms / cfg.patch_dim();
    return std::sqrt(signal_power_per_entry / std::pow(10.0, snr_db / 10.0));
}

std::vector<Scalar> sample_laplace(SeededRng& rng, Index n) {
    std::vector<Scalar> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = rng.laplace();
    return out;
}

Dictionary generate_true_dictionary(const SynthesisConfig& cfg, SeededRng& rng) {
    cfg.validate();
    const int p = cfg.patch_dim();
    Matrix atoms(p, cfg.num_atoms);
    for (Index k = 0; k < cfg.num_atoms; ++k) {
        bool filled = false;
        for (int attempt = 0; attempt < 10000 && !filled; ++attempt) {
            if (cfg.mode == AtomModel::pixel_sparse) {
                for (Index i = 0; i < p; ++i) {
                    atoms(i, k) = rng.bernoulli(cfg.activation_prob) ? rng.laplace() : 0.0;
                }
            } else {
                for (Index i = 0; i < p; ++i) atoms(i, k) = rng.gaussian();
            }
            const Scalar norm = atoms.col(k).norm();
            if (norm <= 1e-12) continue;
            atoms.col(k) /= norm;
            // Zero atoms and near-copies of an earlier atom are redrawn: a
            // ground truth with duplicated atoms is unidentifiable up to the
            // signed-permutation metric, so recovery cannot be measured
            // against it.
            bool duplicate = false;
            for (Index j = 0; j < k && !duplicate; ++j) {
                duplicate = std::abs(atoms.col(j).dot(atoms.col(k))) > 0.99;
            }
            filled = !duplicate;
        }
        require(filled,
                "generate_true_dictionary: cannot draw K distinct nonzero atoms; "
                "raise activation_prob or the patch size");
    }
    return Dictionary(std::move(atoms));
}

std::vector<NodeData> generate_observations(const SynthesisConfig& cfg,
                                            const Dictionary& d_true, SeededRng& rng) {
    cfg.validate();
    require(d_true.patch_dim() == cfg.patch_dim() && d_true.num_atoms() == cfg.num_atoms,
            "generate_observations: dictionary shape does not match config");

    std::vector<NodeData> out;
    out.reserve(cfg.q_per_node.size());
    for (int n = 0; n < cfg.n_nodes(); ++n) {
        const int q = cfg.q_per_node[n];
        NodeData node;
        node.X_true = Matrix::Zero(cfg.num_atoms, q);
        for (Index col = 0; col < q; ++col) {
            for (Index k = 0; k < cfg.num_atoms; ++k) {
                if (rng.bernoulli(cfg.activation_prob)) node.X_true(k, col) = rng.laplace();
            }
        }
        node.Z.resize(cfg.patch_dim(), q);
        for (Index col = 0; col < q; ++col) {
            for (Index i = 0; i < cfg.patch_dim(); ++i) {
                node.Z(i, col) = cfg.sigma[n] * rng.gaussian();
            }
        }
        node.Y = d_true.atoms * node.X_true + node.Z;
        out.push_back(std::move(node));
    }
    return out;
}

std::vector<Matrix> partition_columns(const Eigen::Ref<const Matrix>& Y,
                                      const std::vector<int>& counts) {
    const int total = std::accumulate(counts.begin(), counts.end(), 0);
    require(total == Y.cols(), "partition_columns: counts must sum to the column count");
    std::vector<Matrix> out;
    out.reserve(counts.size());
    Index start = 0;
    for (int c : counts) {
        require(c >= 0, "partition_columns: negative count");
        out.emplace_back(Y.middleCols(start, c));
        start += c;
    }
    return out;
}

SynthesizedExperiment synthesize(const SynthesisConfig& cfg) {
    cfg.validate();
    SynthesizedExperiment exp;
    SeededRng dict_rng(derive_seed(cfg.seed, kDictStream));
    exp.d_true = generate_true_dictionary(cfg, dict_rng);
    exp.nodes.reserve(cfg.q_per_node.size());
    for (int n = 0; n < cfg.n_nodes(); ++n) {
        SynthesisConfig one = cfg;
        one.q_per_node = {cfg.q_per_node[n]};
        one.sigma = {cfg.sigma[n]};
        SeededRng node_rng(derive_seed(cfg.seed, kNodeStream ^ static_cast<std::uint64_t>(n)));
        exp.nodes.push_back(generate_observations(one, exp.d_true, node_rng)[0]);
    }
    return exp;
}

}  // namespace ddl
