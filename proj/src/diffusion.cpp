#include "ddl/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ddl/metrics.hpp"

namespace ddl {

namespace {

constexpr std::uint64_t kInitStream = 0x494E4954;  // "INIT"
constexpr std::uint64_t kNodeRngStream = 0x4E524E47;  // "NRNG"

// Static-stride node parallelism. Worker t handles nodes t, t+T, ...; every
// node's work is self-contained, so the schedule never changes the numbers.
void parallel_over_nodes(int n_nodes, int n_threads, const std::function<void(int)>& work) {
    const int t_count = std::max(1, std::min(n_threads, n_nodes));
    if (t_count == 1) {
        for (int n = 0; n < n_nodes; ++n) work(n);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(t_count);
    for (int t = 0; t < t_count; ++t) {
        workers.emplace_back([&, t]() {
            try {
                for (int n = t; n < n_nodes; n += t_count) work(n);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

// K column indices into q observations: a partial Fisher-Yates draw without
// replacement when q >= K, independent draws otherwise.
std::vector<Index> sample_columns(Index q, Index k, SeededRng& rng) {
    std::vector<Index> picks(static_cast<std::size_t>(k));
    if (q >= k) {
        std::vector<Index> pool(static_cast<std::size_t>(q));
        for (Index i = 0; i < q; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (Index i = 0; i < k; ++i) {
            const Index j = i + rng.uniform_index(q - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            picks[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
        }
    } else {
        for (Index i = 0; i < k; ++i) picks[static_cast<std::size_t>(i)] = rng.uniform_index(q);
    }
    return picks;
}

SparseCodingConfig node_sparse_config(const LearnerConfig& cfg, const NodeState& node) {
    SparseCodingConfig sc = cfg.sparse;
    sc.lambda = node.lambda;
    if (node.mu_X > 0.0) {
        sc.mu = node.mu_X;
        sc.mu_auto = false;
    }
    return sc;
}

// Adapt half of the dictionary update; falls back to "no move" when the codes
// are all zero (the gradient vanishes and the step bound is vacuous).
Matrix adapt_dictionary(const NodeState& node, const LearnerConfig& cfg) {
    const Matrix& X = node.X;
    if (cfg.dict.rule == DictRule::mod) {
        const Scalar trace = X.squaredNorm();
        if (trace == 0.0) return node.D.atoms;
        Scalar ridge = cfg.dict.mod_ridge >= 0.0 ? cfg.dict.mod_ridge : 0.0;
        try {
            return mod_update(node.Y, X, ridge);
        } catch (const SingularGramError&) {
            ridge = 1e-10 * trace / static_cast<Scalar>(X.rows());
            return mod_update(node.Y, X, ridge);
        }
    }
    if (X.squaredNorm() == 0.0) return node.D.atoms;
    Scalar eta;
    if (node.mu_D > 0.0) {
        eta = node.mu_D;
    } else if (cfg.dict.eta_auto) {
        eta = 0.9 * max_eta(X);
    } else {
        eta = cfg.dict.eta;
    }
    return gradient_dict_step(node.Y, node.D.atoms, X, eta);
}

}  // namespace

SeededRng init_stream(std::uint64_t seed) { return SeededRng(derive_seed(seed, kInitStream)); }

void init_dictionaries(std::vector<NodeState>& nodes, Index num_atoms, SeededRng& rng) {
    require(num_atoms >= 1, "init_dictionaries: need at least one atom");
    // A single master draw keys every node's streams through its node_id, so
    // a node's initialization is independent of which other nodes share the
    // call (an A = I network decomposes into N independent learners exactly).
    const std::uint64_t base = rng.next_u64();
    for (NodeState& node : nodes) {
        const Index q = node.Y.cols();
        require(q >= 1, "init_dictionaries: node has no observations");
        SeededRng draw(derive_seed(base, kInitStream ^ static_cast<std::uint64_t>(node.node_id)));

        Matrix atoms(node.Y.rows(), num_atoms);
        Index filled = 0;
        // Zero observations can never seed an atom; redraw around them.
        for (int attempt = 0; attempt < 64 && filled < num_atoms; ++attempt) {
            const std::vector<Index> picks = sample_columns(q, num_atoms - filled, draw);
            for (Index idx : picks) {
                const Scalar norm = node.Y.col(idx).norm();
                if (norm > 1e-12) {
                    atoms.col(filled++) = node.Y.col(idx) / norm;
                }
            }
        }
        require(filled == num_atoms,
                "init_dictionaries: not enough nonzero observations to draw atoms");

        node.D = Dictionary(std::move(atoms));
        node.X = Matrix::Zero(num_atoms, q);
        node.psi = node.D.atoms;
        node.rng = SeededRng(
            derive_seed(base, kNodeRngStream ^ static_cast<std::uint64_t>(node.node_id)));
    }
}

void atc_iteration(std::vector<NodeState>& nodes, const CombinationMatrix& A,
                   const LearnerConfig& cfg, int n_threads) {
    const int n = static_cast<int>(nodes.size());
    require(A.n_nodes() == n, "atc_iteration: combination matrix size must match node count");
    for (const NodeState& node : nodes) {
        require(node.D.num_atoms() >= 1, "atc_iteration: nodes must be initialized first");
        require(node.D.num_atoms() == nodes[0].D.num_atoms() &&
                    node.D.patch_dim() == nodes[0].D.patch_dim(),
                "atc_iteration: all nodes must share dictionary shape");
    }

    // With the literal (delayed) schedule the combine reads the psi values
    // left over from the previous iteration.
    std::vector<Matrix> psi_prev;
    if (cfg.delayed_combine) {
        psi_prev.reserve(nodes.size());
        for (const NodeState& node : nodes) psi_prev.push_back(node.psi);
    }

    // Phase 1: sparse representation + adapt. Embarrassingly parallel.
    parallel_over_nodes(n, n_threads, [&](int i) {
        NodeState& node = nodes[i];
        node.X = sparse_code(node.Y, node.D.atoms, node_sparse_config(cfg, node), node.X);
        node.psi = adapt_dictionary(node, cfg);
    });

    // Phase 2 (after the barrier): combine fresh psi values, then normalize.
    const Matrix& W = A.weights();
    parallel_over_nodes(n, n_threads, [&](int i) {
        NodeState& node = nodes[i];
        Matrix combined = Matrix::Zero(node.D.patch_dim(), node.D.num_atoms());
        for (int l = 0; l < n; ++l) {
            const Scalar w = W(l, i);
            if (w != 0.0) {
                combined.noalias() += w * (cfg.delayed_combine ? psi_prev[l] : nodes[l].psi);
            }
        }
        node.D = finish_update(combined, node.Y, cfg.dict, node.rng);
    });
}

TraceRow evaluate_node(const std::vector<NodeState>& nodes, int node, int iter,
                       const Dictionary* d_true) {
    std::vector<Dictionary> dicts;
    dicts.reserve(nodes.size());
    for (const NodeState& s : nodes) dicts.push_back(s.D);

    const NodeState& s = nodes[node];
    TraceRow row;
    row.iter = iter;
    row.node = node;
    row.objective = objective_l1(s.Y, s.D.atoms, s.X, s.lambda);
    row.recon_mse = reconstruction_mse(s.Y, s.D.atoms, s.X);
    row.consensus = consensus_disagreement(dicts);
    row.dict_dist_true = d_true ? dictionary_distance(s.D, *d_true)
                                : std::numeric_limits<Scalar>::quiet_NaN();
    return row;
}

RunResult run_distributed(std::vector<NodeState> nodes, const CombinationMatrix& A,
                          const LearnerConfig& cfg, const Dictionary* d_true,
                          const TraceSink& sink, int n_threads, int snapshot_every,
                          const SnapshotSink& snap) {
    require(cfg.outer_iters >= 0, "run_distributed: outer_iters must be >= 0");
    require(cfg.record_every >= 1, "run_distributed: record_every must be >= 1");

    RunResult result;
    const int n = static_cast<int>(nodes.size());

    std::vector<Matrix> prev_atoms(nodes.size());
    for (int it = 1; it <= cfg.outer_iters; ++it) {
        for (int i = 0; i < n; ++i) prev_atoms[i] = nodes[i].D.atoms;

        atc_iteration(nodes, A, cfg, n_threads);

        Scalar max_change = 0.0;
        for (int i = 0; i < n; ++i) {
            const Scalar denom = std::max(prev_atoms[i].norm(), Scalar(1e-300));
            max_change = std::max(max_change, (nodes[i].D.atoms - prev_atoms[i]).norm() / denom);
        }
        const bool stop = cfg.stop_tol > 0.0 && max_change < cfg.stop_tol;
        const bool last = stop || it == cfg.outer_iters;

        if (it % cfg.record_every == 0 || last) {
            for (int i = 0; i < n; ++i) {
                TraceRow row = evaluate_node(nodes, i, it, d_true);
                if (sink) sink(row);
                result.trace.rows.push_back(row);
            }
        }
        if (snap && snapshot_every > 0 && (it % snapshot_every == 0 || last)) {
            snap(it, nodes);
        }
        if (stop) break;
    }
    result.nodes = std::move(nodes);
    return result;
}

CentralizedResult run_centralized(const Matrix& Y_all, Index num_atoms, const LearnerConfig& cfg,
                                  std::uint64_t seed, const Dictionary* d_true,
                                  const TraceSink& sink) {
    std::vector<NodeState> nodes(1);
    nodes[0].node_id = 0;
    nodes[0].Y = Y_all;
    nodes[0].lambda = cfg.sparse.lambda;
    SeededRng rng = init_stream(seed);
    init_dictionaries(nodes, num_atoms, rng);

    const CombinationMatrix A = uniform_weights(Topology::isolated(1));
    RunResult run = run_distributed(std::move(nodes), A, cfg, d_true, sink, 1);

    CentralizedResult out;
    out.D = run.nodes[0].D;
    out.X = run.nodes[0].X;
    out.trace = std::move(run.trace);
    return out;
}

ScalarAtcResult run_scalar_atc(const std::vector<Matrix>& regressors,
                               const std::vector<Vector>& observations, const Vector& w0,
                               const ScalarAtcConfig& cfg, const CombinationMatrix& A) {
    const int n = static_cast<int>(regressors.size());
    require(n >= 1, "run_scalar_atc: need at least one node");
    require(static_cast<int>(observations.size()) == n,
            "run_scalar_atc: one observation sequence per node");
    require(static_cast<int>(cfg.mu.size()) == n, "run_scalar_atc: one step size per node");
    require(A.n_nodes() == n, "run_scalar_atc: combination matrix size must match node count");

    const Index m = w0.size();
    const Index steps = regressors[0].cols();
    for (int i = 0; i < n; ++i) {
        require(regressors[i].rows() == m, "run_scalar_atc: regressor dimension mismatch");
        require(regressors[i].cols() == steps && observations[i].size() == steps,
                "run_scalar_atc: all nodes must share the time horizon");
    }

    ScalarAtcResult result;
    result.trajectory.assign(n, Matrix(m, steps + 1));
    std::vector<Vector> w(n, w0), psi(n, w0);
    for (int i = 0; i < n; ++i) result.trajectory[i].col(0) = w0;

    const Matrix& W = A.weights();
    for (Index t = 0; t < steps; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto x = regressors[i].col(t);
            const Scalar err = observations[i](t) - w[i].dot(x);
            psi[i] = w[i] + cfg.mu[i] * err * x;
        }
        for (int i = 0; i < n; ++i) {
            Vector combined = Vector::Zero(m);
            for (int l = 0; l < n; ++l) {
                if (W(l, i) != 0.0) combined += W(l, i) * psi[l];
            }
            w[i] = combined;
            if (w[i].norm() > cfg.divergence_ceiling) {
                throw DivergenceError("run_scalar_atc: estimate norm exceeded ceiling");
            }
            result.trajectory[i].col(t + 1) = w[i];
        }
    }
    return result;
}

}  // namespace ddl
