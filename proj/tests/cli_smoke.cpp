// End-to-end exercise of the built ddl binary (path passed as argv[1]):
// synth -> train (both modes) -> compare, plus exit-code checks.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: ddl_cli_smoke <path-to-ddl>\n";
        return 1;
    }
    const std::string ddl = argv[1];
    const fs::path dir = fs::temp_directory_path() / "ddl_cli_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path out = dir / "out";

    const fs::path cfg = dir / "cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({
  "seed": 7,
  "output_dir": ")" << out.string() << R"(",
  "synthesis": {
    "patch_side": 3, "num_atoms": 10, "q_per_node": [32, 32, 32, 32],
    "activation_prob": 0.2, "snr_db": 20.0
  },
  "network": { "rule": "ring4_preset" },
  "sparse": { "lambda": 0.05, "standard_ista": true, "inner_iters": 10 },
  "learner": { "outer_iters": 3 }
}
)";
    }

    check(run(ddl + " synth -c " + cfg.string()) == 0, "synth exits 0");
    check(fs::exists(out / "data.ddly"), "dataset written");
    check(fs::exists(out / "true_dictionary.ddly"), "ground truth written");

    check(run(ddl + " train -c " + cfg.string() + " --mode distributed") == 0,
          "distributed train exits 0");
    check(fs::exists(out / "distributed" / "trace.csv"), "distributed trace written");

    check(run(ddl + " train -c " + cfg.string() + " --mode centralized") == 0,
          "centralized train exits 0");

    const std::string compare_cmd = ddl + " compare " + (out / "distributed").string() + " " +
                                    (out / "centralized").string() + " -o " +
                                    (dir / "report").string() + " > /dev/null";
    check(run(compare_cmd) == 0, "compare exits 0");
    check(fs::exists(dir / "report" / "report.csv"), "report written");

    // usage/config errors
    check(run(ddl + " train -c " + cfg.string() + " --mode nope 2> /dev/null") == 2,
          "bad mode exits 2");
    check(run(ddl + " synth -c " + (dir / "absent.json").string() + " 2> /dev/null") == 3,
          "missing config exits 3");
    const fs::path bad_cfg = dir / "bad.json";
    {
        std::ofstream f(bad_cfg);
        f << "{ \"output_dir\": 3 }";
    }
    check(run(ddl + " synth -c " + bad_cfg.string() + " 2> /dev/null") == 2,
          "type-mismatched config exits 2");
    check(run(ddl + " 2> /dev/null") == 2, "missing subcommand exits 2");

    if (failures == 0) std::printf("cli smoke: all checks passed\n");
    return failures == 0 ? 0 : 1;
}
