#include "ddl/experiment.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include "ddl/io.hpp"
#include "ddl/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ddl {

namespace {

void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw std::invalid_argument("config: unknown key '" + ctx + key + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (auto it = j.find(key); it != j.end()) return it->get<T>();
    return fallback;
}

AtomModel parse_atom_model(const std::string& s) {
    if (s == "pixel_sparse") return AtomModel::pixel_sparse;
    if (s == "dict_sparse") return AtomModel::dict_sparse;
    throw std::invalid_argument("config: unknown synthesis mode '" + s + "'");
}

WeightRule parse_weight_rule(const std::string& s) {
    if (s == "ring4_preset") return WeightRule::ring4_preset;
    if (s == "uniform") return WeightRule::uniform;
    if (s == "relative_degree_variance") return WeightRule::relative_degree_variance;
    if (s == "explicit") return WeightRule::explicit_matrix;
    throw std::invalid_argument("config: unknown network rule '" + s + "'");
}

LambdaMode parse_lambda_mode(const std::string& s) {
    if (s == "fixed") return LambdaMode::fixed;
    if (s == "noise_scaled") return LambdaMode::noise_scaled;
    throw std::invalid_argument("config: unknown lambda_mode '" + s + "'");
}

DictRule parse_dict_rule(const std::string& s) {
    if (s == "gradient") return DictRule::gradient;
    if (s == "mod") return DictRule::mod;
    throw std::invalid_argument("config: unknown dict rule '" + s + "'");
}

DeadAtomPolicy parse_dead_atom_policy(const std::string& s) {
    if (s == "reseed_from_data") return DeadAtomPolicy::reseed_from_data;
    if (s == "keep") return DeadAtomPolicy::keep;
    throw std::invalid_argument("config: unknown dead_atom_policy '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    check_keys(j, "", {"seed", "output_dir", "synthesis", "network", "sparse", "dict", "learner"});

    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    cfg.output_dir = get_or<std::string>(j, "output_dir", "");

    if (j.contains("synthesis")) {
        const json& s = j.at("synthesis");
        check_keys(s, "synthesis.",
                   {"patch_side", "num_atoms", "q_per_node", "activation_prob", "sigma", "snr_db",
                    "mode"});
        cfg.synthesis.patch_side = get_or<int>(s, "patch_side", 4);
        cfg.synthesis.num_atoms = get_or<int>(s, "num_atoms", 32);
        cfg.synthesis.q_per_node =
            get_or<std::vector<int>>(s, "q_per_node", {256, 256, 256, 256});
        cfg.synthesis.activation_prob = get_or<Scalar>(s, "activation_prob", 0.1);
        cfg.synthesis.mode = parse_atom_model(get_or<std::string>(s, "mode", "pixel_sparse"));
        if (s.contains("sigma") && s.contains("snr_db")) {
            throw std::invalid_argument("config: give synthesis.sigma or synthesis.snr_db, not both");
        }
        if (s.contains("sigma")) {
            cfg.synthesis.sigma = s.at("sigma").get<std::vector<Scalar>>();
        } else if (s.contains("snr_db")) {
            const Scalar sig = sigma_for_snr_db(cfg.synthesis, s.at("snr_db").get<Scalar>());
            cfg.synthesis.sigma.assign(cfg.synthesis.q_per_node.size(), sig);
        } else {
            cfg.synthesis.sigma.assign(cfg.synthesis.q_per_node.size(), 0.0);
        }
    } else {
        cfg.synthesis.sigma.assign(cfg.synthesis.q_per_node.size(), 0.0);
    }
    cfg.synthesis.seed = cfg.seed;

    if (j.contains("network")) {
        const json& n = j.at("network");
        check_keys(n, "network.", {"rule", "edges", "weights"});
        cfg.weight_rule = parse_weight_rule(get_or<std::string>(n, "rule", "ring4_preset"));
        if (n.contains("edges")) {
            for (const auto& e : n.at("edges")) {
                if (!e.is_array() || e.size() != 2) {
                    throw std::invalid_argument("config: network.edges entries must be pairs");
                }
                cfg.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        }
        if (n.contains("weights")) {
            const auto rows = n.at("weights").get<std::vector<std::vector<Scalar>>>();
            const Index nn = static_cast<Index>(rows.size());
            cfg.explicit_weights.resize(nn, nn);
            for (Index r = 0; r < nn; ++r) {
                if (static_cast<Index>(rows[r].size()) != nn) {
                    throw std::invalid_argument("config: network.weights must be square");
                }
                for (Index c = 0; c < nn; ++c) cfg.explicit_weights(r, c) = rows[r][c];
            }
        }
    }

    if (j.contains("sparse")) {
        const json& s = j.at("sparse");
        check_keys(s, "sparse.",
                   {"lambda", "lambda_mode", "lambda_per_node", "mu", "mu_auto", "inner_iters",
                    "standard_ista"});
        cfg.learner.sparse.lambda = get_or<Scalar>(s, "lambda", 0.1);
        cfg.lambda_mode = parse_lambda_mode(get_or<std::string>(s, "lambda_mode", "fixed"));
        cfg.lambda_per_node = get_or<std::vector<Scalar>>(s, "lambda_per_node", {});
        cfg.learner.sparse.mu = get_or<Scalar>(s, "mu", 0.0);
        cfg.learner.sparse.mu_auto = get_or<bool>(s, "mu_auto", true);
        cfg.learner.sparse.inner_iters = get_or<int>(s, "inner_iters", 30);
        cfg.learner.sparse.standard_ista = get_or<bool>(s, "standard_ista", false);
    }

    if (j.contains("dict")) {
        const json& d = j.at("dict");
        check_keys(d, "dict.",
                   {"rule", "eta", "eta_auto", "zero_tol", "dead_atom_policy", "mod_ridge"});
        cfg.learner.dict.rule = parse_dict_rule(get_or<std::string>(d, "rule", "gradient"));
        cfg.learner.dict.eta = get_or<Scalar>(d, "eta", 0.0);
        cfg.learner.dict.eta_auto = get_or<bool>(d, "eta_auto", true);
        cfg.learner.dict.zero_tol = get_or<Scalar>(d, "zero_tol", 1e-12);
        cfg.learner.dict.dead_atom_policy =
            parse_dead_atom_policy(get_or<std::string>(d, "dead_atom_policy", "reseed_from_data"));
        cfg.learner.dict.mod_ridge = get_or<Scalar>(d, "mod_ridge", -1.0);
    }

    if (j.contains("learner")) {
        const json& l = j.at("learner");
        check_keys(l, "learner.",
                   {"outer_iters", "stop_tol", "record_every", "snapshot_every",
                    "delayed_combine"});
        cfg.learner.outer_iters = get_or<int>(l, "outer_iters", 200);
        cfg.learner.stop_tol = get_or<Scalar>(l, "stop_tol", 0.0);
        cfg.learner.record_every = get_or<int>(l, "record_every", 1);
        cfg.snapshot_every = get_or<int>(l, "snapshot_every", 0);
        cfg.learner.delayed_combine = get_or<bool>(l, "delayed_combine", false);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir;

    json& s = j["synthesis"];
    s["patch_side"] = synthesis.patch_side;
    s["num_atoms"] = synthesis.num_atoms;
    s["q_per_node"] = synthesis.q_per_node;
    s["activation_prob"] = synthesis.activation_prob;
    s["sigma"] = synthesis.sigma;
    s["mode"] = synthesis.mode == AtomModel::pixel_sparse ? "pixel_sparse" : "dict_sparse";

    json& n = j["network"];
    switch (weight_rule) {
        case WeightRule::ring4_preset: n["rule"] = "ring4_preset"; break;
        case WeightRule::uniform: n["rule"] = "uniform"; break;
        case WeightRule::relative_degree_variance: n["rule"] = "relative_degree_variance"; break;
        case WeightRule::explicit_matrix: n["rule"] = "explicit"; break;
    }
    if (!edges.empty()) {
        json je = json::array();
        for (const auto& [a, b] : edges) je.push_back(json::array({a, b}));
        n["edges"] = je;
    }
    if (explicit_weights.size() > 0) {
        json jw = json::array();
        for (Index r = 0; r < explicit_weights.rows(); ++r) {
            json row = json::array();
            for (Index c = 0; c < explicit_weights.cols(); ++c) row.push_back(explicit_weights(r, c));
            jw.push_back(row);
        }
        n["weights"] = jw;
    }

    json& sp = j["sparse"];
    sp["lambda"] = learner.sparse.lambda;
    sp["lambda_mode"] = lambda_mode == LambdaMode::fixed ? "fixed" : "noise_scaled";
    if (!lambda_per_node.empty()) sp["lambda_per_node"] = lambda_per_node;
    sp["mu"] = learner.sparse.mu;
    sp["mu_auto"] = learner.sparse.mu_auto;
    sp["inner_iters"] = learner.sparse.inner_iters;
    sp["standard_ista"] = learner.sparse.standard_ista;

    json& d = j["dict"];
    d["rule"] = learner.dict.rule == DictRule::gradient ? "gradient" : "mod";
    d["eta"] = learner.dict.eta;
    d["eta_auto"] = learner.dict.eta_auto;
    d["zero_tol"] = learner.dict.zero_tol;
    d["dead_atom_policy"] = learner.dict.dead_atom_policy == DeadAtomPolicy::reseed_from_data
                                ? "reseed_from_data"
                                : "keep";
    d["mod_ridge"] = learner.dict.mod_ridge;

    json& l = j["learner"];
    l["outer_iters"] = learner.outer_iters;
    l["stop_tol"] = learner.stop_tol;
    l["record_every"] = learner.record_every;
    l["snapshot_every"] = snapshot_every;
    l["delayed_combine"] = learner.delayed_combine;

    return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
    synthesis.validate();
    require(!output_dir.empty(), "config: output_dir is required");
    const int n = synthesis.n_nodes();
    if (weight_rule == WeightRule::ring4_preset) {
        require(n == 4, "config: ring4_preset requires exactly 4 nodes");
    }
    if (weight_rule == WeightRule::explicit_matrix) {
        require(explicit_weights.rows() == n && explicit_weights.cols() == n,
                "config: explicit weights must be n_nodes x n_nodes");
    }
    for (const auto& [a, b] : edges) {
        require(a >= 0 && a < n && b >= 0 && b < n, "config: edge endpoint out of range");
    }
    if (!lambda_per_node.empty()) {
        require(static_cast<int>(lambda_per_node.size()) == n,
                "config: lambda_per_node needs one entry per node");
    }
    if (lambda_mode == LambdaMode::noise_scaled && lambda_per_node.empty()) {
        for (Scalar s : synthesis.sigma) {
            require(s > 0.0, "config: noise_scaled lambda needs positive sigma everywhere");
        }
    }
    require(learner.outer_iters >= 0, "config: outer_iters must be >= 0");
    require(learner.record_every >= 1, "config: record_every must be >= 1");
    require(snapshot_every >= 0, "config: snapshot_every must be >= 0");
    require(learner.sparse.inner_iters >= 1, "config: inner_iters must be >= 1");
    require(learner.sparse.lambda >= 0.0, "config: lambda must be nonnegative");
}

Topology ExperimentConfig::topology() const {
    if (weight_rule == WeightRule::ring4_preset) return Topology::ring(4);
    return Topology::from_edges(synthesis.n_nodes(), edges);
}

CombinationMatrix ExperimentConfig::combination(const Topology& topo) const {
    switch (weight_rule) {
        case WeightRule::ring4_preset: return preset_ring4().second;
        case WeightRule::uniform: return uniform_weights(topo);
        case WeightRule::relative_degree_variance: {
            std::vector<Scalar> sigma2;
            sigma2.reserve(synthesis.sigma.size());
            for (Scalar s : synthesis.sigma) sigma2.push_back(s * s);
            return relative_degree_variance_weights(topo, sigma2);
        }
        case WeightRule::explicit_matrix: return validate_combination(explicit_weights, topo);
    }
    throw std::logic_error("unreachable");
}

std::vector<Scalar> ExperimentConfig::node_lambdas() const {
    if (!lambda_per_node.empty()) return lambda_per_node;
    std::vector<Scalar> out(synthesis.q_per_node.size(), learner.sparse.lambda);
    if (lambda_mode == LambdaMode::noise_scaled) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = learner.sparse.lambda * synthesis.sigma[i] * synthesis.sigma[i];
        }
    }
    return out;
}

Scalar ExperimentConfig::centralized_lambda() const {
    const std::vector<Scalar> l = node_lambdas();
    return std::accumulate(l.begin(), l.end(), Scalar(0)) / static_cast<Scalar>(l.size());
}

int resolve_threads_from_env() {
    const char* env = std::getenv("DDL_THREADS");
    if (env != nullptr && *env != '\0') {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

constexpr const char* kDataFile = "data.ddly";
constexpr const char* kTruthFile = "true_dictionary.ddly";

template <typename Fn>
int run_command(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    }
}

// Synthesizes (or reloads) the dataset deterministically and leaves both
// files on disk, so synth and train agree byte-for-byte.
struct Dataset {
    Matrix Y_all;
    Dictionary d_true;
};

Dataset ensure_dataset(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const fs::path data_path = fs::path(cfg.output_dir) / kDataFile;
    const fs::path truth_path = fs::path(cfg.output_dir) / kTruthFile;

    Dataset ds;
    if (fs::exists(data_path) && fs::exists(truth_path)) {
        DdlyFile data = read_ddly(data_path.string());
        DdlyFile truth = read_ddly(truth_path.string());
        require(data.data.rows() == cfg.synthesis.patch_dim() &&
                    data.data.cols() == cfg.synthesis.total_columns() &&
                    static_cast<int>(data.k) == cfg.synthesis.num_atoms,
                "dataset on disk does not match the config");
        ds.Y_all = std::move(data.data);
        ds.d_true = Dictionary(std::move(truth.data));
        return ds;
    }

    SynthesizedExperiment exp = synthesize(cfg.synthesis);
    ds.d_true = exp.d_true;
    ds.Y_all.resize(cfg.synthesis.patch_dim(), cfg.synthesis.total_columns());
    Index col = 0;
    for (const NodeData& node : exp.nodes) {
        ds.Y_all.middleCols(col, node.Y.cols()) = node.Y;
        col += node.Y.cols();
    }
    write_ddly(data_path.string(), ds.Y_all, static_cast<std::uint32_t>(cfg.synthesis.num_atoms));
    write_ddly(truth_path.string(), ds.d_true.atoms,
               static_cast<std::uint32_t>(cfg.synthesis.num_atoms));
    return ds;
}

void dump_dictionary(const fs::path& stem, const Dictionary& d, int patch_side) {
    write_ddly(stem.string() + ".ddly", d.atoms, static_cast<std::uint32_t>(d.num_atoms()));
    write_pgm_mosaic(stem.string() + ".pgm", d, patch_side);
}

Dictionary average_dictionary(const std::vector<Dictionary>& dicts) {
    Matrix sum = Matrix::Zero(dicts[0].patch_dim(), dicts[0].num_atoms());
    for (const Dictionary& d : dicts) sum += d.atoms;
    sum /= static_cast<Scalar>(dicts.size());
    return Dictionary(normalize_columns(sum).normalized);
}

struct LoadedRun {
    std::string dir;
    std::string mode;
    int patch_side = 0;
    Index num_atoms = 0;
    std::vector<Dictionary> final_dicts;
    Dictionary d_true;
    IterationTrace trace;
};

LoadedRun load_run(const std::string& dir) {
    const fs::path base(dir);
    const fs::path manifest_path = base / "run.json";
    if (!fs::exists(manifest_path)) {
        throw std::invalid_argument("not a run directory (no run.json): " + dir);
    }
    std::ifstream in(manifest_path);
    json manifest = json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                            std::istreambuf_iterator<char>()));
    LoadedRun run;
    run.dir = dir;
    run.mode = manifest.at("mode").get<std::string>();
    run.patch_side = manifest.at("patch_side").get<int>();
    run.num_atoms = manifest.at("num_atoms").get<int>();

    const fs::path trace_path = base / "trace.csv";
    if (!fs::exists(trace_path)) {
        throw std::invalid_argument("run has no trace.csv: " + dir);
    }
    run.trace = read_trace_csv(trace_path.string());

    for (const auto& rel : manifest.at("final_dicts")) {
        const fs::path p = base / rel.get<std::string>();
        if (!fs::exists(p)) throw std::invalid_argument("missing dictionary dump: " + p.string());
        run.final_dicts.emplace_back(read_ddly(p.string()).data);
    }
    const fs::path truth = base / manifest.at("truth").get<std::string>();
    if (!fs::exists(truth)) throw std::invalid_argument("missing ground truth: " + truth.string());
    run.d_true = Dictionary(read_ddly(truth.string()).data);
    return run;
}

Scalar final_mean_recon(const IterationTrace& trace) {
    if (trace.rows.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
    const int last = trace.rows.back().iter;
    Scalar sum = 0.0;
    int count = 0;
    for (const TraceRow& r : trace.rows) {
        if (r.iter == last) {
            sum += r.recon_mse;
            ++count;
        }
    }
    return sum / count;
}

}  // namespace

int cmd_synth(const std::string& config_path) {
    return run_command([&] {
        const ExperimentConfig cfg = ExperimentConfig::load(config_path);
        ensure_dataset(cfg);
    });
}

int cmd_train(const std::string& config_path, const std::string& mode) {
    return run_command([&] {
        require(mode == "distributed" || mode == "centralized",
                "mode must be 'distributed' or 'centralized'");
        const ExperimentConfig cfg = ExperimentConfig::load(config_path);
        const Dataset ds = ensure_dataset(cfg);
        const int n_threads = resolve_threads_from_env();

        const fs::path run_dir = fs::path(cfg.output_dir) / mode;
        fs::create_directories(run_dir);

        // Assemble node states: one per network node, or a single node
        // holding the concatenated data in centralized mode.
        std::vector<NodeState> nodes;
        CombinationMatrix A = uniform_weights(Topology::isolated(1));
        if (mode == "distributed") {
            const Topology topo = cfg.topology();
            A = cfg.combination(topo);
            const std::vector<Matrix> parts = partition_columns(ds.Y_all, cfg.synthesis.q_per_node);
            const std::vector<Scalar> lambdas = cfg.node_lambdas();
            nodes.resize(parts.size());
            for (std::size_t i = 0; i < parts.size(); ++i) {
                nodes[i].node_id = static_cast<int>(i);
                nodes[i].Y = parts[i];
                nodes[i].lambda = lambdas[i];
            }
        } else {
            nodes.resize(1);
            nodes[0].node_id = 0;
            nodes[0].Y = ds.Y_all;
            nodes[0].lambda = cfg.centralized_lambda();
        }
        SeededRng rng = init_stream(cfg.seed);
        init_dictionaries(nodes, cfg.synthesis.num_atoms, rng);

        TraceCsvWriter writer((run_dir / "trace.csv").string());

        // Initial (iteration 0) rows set the divergence baseline.
        std::vector<Scalar> initial_objective(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const TraceRow row = evaluate_node(nodes, static_cast<int>(i), 0, &ds.d_true);
            initial_objective[i] = row.objective;
            writer.write(row);
        }

        const TraceSink sink = [&](const TraceRow& row) {
            writer.write(row);
            const Scalar baseline = std::max(initial_objective[row.node], Scalar(1e-12));
            if (!(row.objective < 1e6 * baseline)) {
                throw DivergenceError("objective exceeded 1e6 x initial at node " +
                                      std::to_string(row.node));
            }
        };

        const fs::path snap_dir = run_dir / "snapshots";
        SnapshotSink snap;
        if (cfg.snapshot_every > 0) {
            fs::create_directories(snap_dir);
            snap = [&](int iter, const std::vector<NodeState>& states) {
                char tag[32];
                std::snprintf(tag, sizeof(tag), "iter_%06d", iter);
                for (const NodeState& s : states) {
                    dump_dictionary(snap_dir / (std::string(tag) + "_node" +
                                                std::to_string(s.node_id)),
                                    s.D, cfg.synthesis.patch_side);
                }
            };
        }

        RunResult result = run_distributed(std::move(nodes), A, cfg.learner, &ds.d_true, sink,
                                           n_threads, cfg.snapshot_every, snap);
        writer.flush();

        // Final dictionaries, their node average, and the manifest.
        std::vector<Dictionary> finals;
        json final_list = json::array();
        for (const NodeState& s : result.nodes) {
            const std::string stem = "dict_node" + std::to_string(s.node_id);
            dump_dictionary(run_dir / stem, s.D, cfg.synthesis.patch_side);
            final_list.push_back(stem + ".ddly");
            finals.push_back(s.D);
        }
        dump_dictionary(run_dir / "dict_avg", average_dictionary(finals),
                        cfg.synthesis.patch_side);

        json manifest;
        manifest["mode"] = mode;
        manifest["patch_side"] = cfg.synthesis.patch_side;
        manifest["num_atoms"] = cfg.synthesis.num_atoms;
        manifest["n_nodes"] = static_cast<int>(result.nodes.size());
        manifest["final_dicts"] = final_list;
        manifest["truth"] = "../" + std::string(kTruthFile);
        manifest["config"] = json::parse(cfg.to_json_text());
        std::ofstream mout(run_dir / "run.json");
        if (!mout) throw IoError("cannot write run manifest");
        mout << manifest.dump(2) << "\n";
    });
}

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& report_dir) {
    return run_command([&] {
        require(run_dirs.size() >= 2, "compare needs at least two run directories");
        std::vector<LoadedRun> runs;
        runs.reserve(run_dirs.size());
        for (const std::string& dir : run_dirs) runs.push_back(load_run(dir));
        for (const LoadedRun& run : runs) {
            require(run.num_atoms == runs[0].num_atoms && run.patch_side == runs[0].patch_side,
                    "compare: runs have incompatible dictionary shapes");
        }

        fs::create_directories(report_dir);
        std::ofstream report(fs::path(report_dir) / "report.csv");
        if (!report) throw IoError("cannot write report.csv");
        report << "run,metric,node,value\n";
        std::cout << "run,metric,node,value\n";
        auto emit = [&](const std::string& run, const std::string& metric, int node, Scalar value) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            report << run << "," << metric << "," << node << "," << buf << "\n";
            std::cout << run << "," << metric << "," << node << "," << buf << "\n";
        };

        const Scalar base_recon = final_mean_recon(runs[0].trace);
        std::vector<std::vector<Scalar>> dist_true(runs.size());
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const LoadedRun& run = runs[r];
            for (std::size_t nd = 0; nd < run.final_dicts.size(); ++nd) {
                const Scalar d = dictionary_distance(run.final_dicts[nd], run.d_true);
                dist_true[r].push_back(d);
                emit(run.dir, "dict_dist_true", static_cast<int>(nd), d);
            }
            emit(run.dir, "recon_mse_final", -1, final_mean_recon(run.trace));
            emit(run.dir, "recon_mse_ratio_vs_first", -1,
                 final_mean_recon(run.trace) / base_recon);
            emit(run.dir, "consensus_final", -1,
                 run.trace.rows.empty() ? std::numeric_limits<Scalar>::quiet_NaN()
                                        : run.trace.rows.back().consensus);
            for (std::size_t nd = 0; nd < dist_true[r].size() && nd < dist_true[0].size(); ++nd) {
                emit(run.dir, "dict_dist_true_delta_vs_first", static_cast<int>(nd),
                     dist_true[r][nd] - dist_true[0][nd]);
            }

            Dictionary avg = average_dictionary(run.final_dicts);
            write_pgm_mosaic((fs::path(report_dir) / ("avg_run" + std::to_string(r) + ".pgm"))
                                 .string(),
                             avg, run.patch_side);
        }
    });
}

}  // namespace ddl
