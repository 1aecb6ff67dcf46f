// ddl — diffusion dictionary learning experiment runner.
//
//   ddl synth   -c cfg.json                  synthesize the dataset files
//   ddl train   -c cfg.json --mode MODE      run distributed or centralized learning
//   ddl compare RUN_A RUN_B [...] [-o DIR]   compare completed runs
//
// DDL_THREADS caps the per-node workers (0 or unset = auto).
// Exit codes: 0 ok, 2 config/usage error, 3 I/O failure, 4 numerical divergence.
#include <CLI11.hpp>

#include <string>
#include <vector>

#include "ddl/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"diffusion dictionary learning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode = "distributed";
    std::vector<std::string> run_dirs;
    std::string report_dir = "compare_out";

    CLI::App* synth = app.add_subcommand("synth", "synthesize a dataset from a config");
    synth->add_option("-c,--config", config_path, "experiment config (JSON)")->required();

    CLI::App* train = app.add_subcommand("train", "run dictionary learning");
    train->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
    train->add_option("--mode", mode, "distributed|centralized")
        ->check(CLI::IsMember({"distributed", "centralized"}));

    CLI::App* compare = app.add_subcommand("compare", "compare completed runs");
    compare->add_option("runs", run_dirs, "run directories")->expected(-2);
    compare->add_option("-o,--out", report_dir, "report output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (synth->parsed()) return ddl::cmd_synth(config_path);
    if (train->parsed()) return ddl::cmd_train(config_path, mode);
    return ddl::cmd_compare(run_dirs, report_dir);
}
