// Experiment configuration (JSON) and the synth/train/compare commands that
// the CLI exposes. Exit codes: 0 ok, 2 config/usage error, 3 I/O failure,
// 4 numerical divergence.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ddl/datagen.hpp"
#include "ddl/diffusion.hpp"
#include "ddl/network.hpp"
#include "ddl/types.hpp"

namespace ddl {

enum class WeightRule { ring4_preset, uniform, relative_degree_variance, explicit_matrix };
enum class LambdaMode { fixed, noise_scaled };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string output_dir;

    SynthesisConfig synthesis;

    WeightRule weight_rule = WeightRule::ring4_preset;
    std::vector<std::pair<int, int>> edges;  // for non-preset rules
    Matrix explicit_weights;                 // for explicit_matrix

    LambdaMode lambda_mode = LambdaMode::fixed;
    std::vector<Scalar> lambda_per_node;  // optional override, one per node

    LearnerConfig learner;
    int snapshot_every = 0;  // 0: only the final dictionaries are dumped

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;

    // Cross-field consistency; throws std::invalid_argument with a
    // field-qualified message.
    void validate() const;

    Topology topology() const;
    CombinationMatrix combination(const Topology& topo) const;
    // Per-node lambda after applying lambda_mode and any explicit override.
    std::vector<Scalar> node_lambdas() const;
    Scalar centralized_lambda() const;  // node-average of node_lambdas()
};

// Worker cap from the DDL_THREADS environment variable: unset or 0 means
// auto (hardware concurrency), anything else is the cap.
int resolve_threads_from_env();

// Writes <output_dir>/data.ddly and <output_dir>/true_dictionary.ddly;
// byte-identical on re-run for a fixed config.
int cmd_synth(const std::string& config_path);

// Trains in "distributed" or "centralized" mode, synthesizing the dataset if
// it is not already on disk. Writes <output_dir>/<mode>/trace.csv, final
// dictionary dumps (.ddly + .pgm mosaics), optional mid-run snapshots, and a
// run.json manifest.
int cmd_train(const std::string& config_path, const std::string& mode);

// Compares >= 2 completed runs: per-node dictionary distance to the ground
// truth, reconstruction-MSE ratio and consensus against the first run.
// Writes report.csv and node-averaged dictionary mosaics into report_dir.
int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& report_dir);

}  // namespace ddl
