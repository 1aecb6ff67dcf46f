// Distributed adapt-then-combine dictionary learning, the centralized
// baseline, and a scalar ATC-LMS reference used to validate the diffusion
// machinery against known least-mean-squares behavior.
//
// One outer iteration runs, for every node: (1) sparse-code the local data
// against the local dictionary, (2) adapt the dictionary along the local
// residual gradient into an intermediate estimate psi, then after a barrier
// (3) combine neighbors' fresh psi values with the combination weights and
// (4) re-normalize atoms. Steps (1)-(2) of all nodes complete before any node
// combines; node work is deterministic per node, so results are bit-identical
// for any worker count.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ddl/dict_update.hpp"
#include "ddl/network.hpp"
#include "ddl/rng.hpp"
#include "ddl/sparse_coding.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct NodeState {
    int node_id = 0;
    Matrix Y;      // p x q_n local observations
    Dictionary D;  // local dictionary estimate
    Matrix X;      // K x q_n local codes (warm start between outer iterations)
    Scalar lambda = 0.1;
    Scalar mu_X = 0.0;  // sparse-coding step; <= 0 means auto
    Scalar mu_D = 0.0;  // dictionary step; <= 0 means auto (0.9 * max_eta)
    Matrix psi;         // p x K intermediate adapt result
    SeededRng rng{1};   // per-node stream (dead-atom reseeds)
};

struct LearnerConfig {
    int outer_iters = 200;
    Scalar stop_tol = 0.0;  // stop when max-node relative dictionary change < stop_tol
    int record_every = 1;
    bool delayed_combine = false;  // combine previous-iteration psi (literal schedule)
    SparseCodingConfig sparse;     // lambda here is the default; NodeState.lambda wins
    DictUpdateConfig dict;
};

struct TraceRow {
    int iter = 0;
    int node = 0;
    Scalar objective = 0.0;  // (1/2)||Y-DX||_F^2 + lambda_n ||X||_1
    Scalar recon_mse = 0.0;
    Scalar consensus = 0.0;
    Scalar dict_dist_true = 0.0;  // NaN when no ground truth is available
};

struct IterationTrace {
    std::vector<TraceRow> rows;
};

using TraceSink = std::function<void(const TraceRow&)>;
using SnapshotSink = std::function<void(int iter, const std::vector<NodeState>&)>;

// Each node's initial dictionary: K normalized columns drawn from its own
// observations (without replacement when q_n >= K, with replacement
// otherwise; zero columns are never selected). Also zeroes the codes, seeds
// psi with the initial atoms and hands each node its own child RNG stream.
void init_dictionaries(std::vector<NodeState>& nodes, Index num_atoms, SeededRng& rng);

// One synchronous outer iteration (sparse code + adapt for all nodes, then
// combine + normalize). n_threads caps the worker count; any value yields
// bit-identical results.
void atc_iteration(std::vector<NodeState>& nodes, const CombinationMatrix& A,
                   const LearnerConfig& cfg, int n_threads = 1);

// Metrics snapshot for one node at one iteration (consensus is shared).
TraceRow evaluate_node(const std::vector<NodeState>& nodes, int node, int iter,
                       const Dictionary* d_true);

struct RunResult {
    std::vector<NodeState> nodes;
    IterationTrace trace;
};

// Runs atc_iteration until outer_iters or until the max-node relative
// dictionary change drops below stop_tol; emits one row per node every
// record_every iterations (and at the final one). When snapshot_every > 0,
// snap receives the node states at that cadence (and at the final iteration).
RunResult run_distributed(std::vector<NodeState> nodes, const CombinationMatrix& A,
                          const LearnerConfig& cfg, const Dictionary* d_true = nullptr,
                          const TraceSink& sink = {}, int n_threads = 1, int snapshot_every = 0,
                          const SnapshotSink& snap = {});

struct CentralizedResult {
    Dictionary D;
    Matrix X;
    IterationTrace trace;
};

// The same alternation with a single node holding all data and A = [1];
// byte-for-byte the one-node diffusion run.
CentralizedResult run_centralized(const Matrix& Y_all, Index num_atoms, const LearnerConfig& cfg,
                                  std::uint64_t seed, const Dictionary* d_true = nullptr,
                                  const TraceSink& sink = {});

// Master-stream derivation shared by run_centralized and the experiment
// runner so that one-node distributed and centralized runs coincide.
SeededRng init_stream(std::uint64_t seed);

// ---- scalar ATC-LMS reference ------------------------------------------

struct ScalarAtcConfig {
    std::vector<Scalar> mu;             // per-node LMS step
    Scalar divergence_ceiling = 1e6;    // throw DivergenceError past this norm
};

struct ScalarAtcResult {
    // Per node: m x (T+1) trajectory of weight estimates, column 0 = w0.
    std::vector<Matrix> trajectory;
};

// Diffusion LMS (adapt-then-combine) on scalar regressions
// y_n(i) = w_o^T x_n(i) + z_n(i), no observation sharing:
//   psi_n = w_n + mu_n x_n(i) (y_n(i) - w_n^T x_n(i));  w_n = sum_l a(l,n) psi_l.
ScalarAtcResult run_scalar_atc(const std::vector<Matrix>& regressors,
                               const std::vector<Vector>& observations, const Vector& w0,
                               const ScalarAtcConfig& cfg, const CombinationMatrix& A);

}  // namespace ddl
