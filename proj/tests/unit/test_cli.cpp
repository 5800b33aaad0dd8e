// Drives the built command-line binary end to end through a shell.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sing/graph.hpp"
#include "sing/experiment.hpp"
#include "sing/sample_matrix.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SING_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string out_path = "/tmp/sing_cli_out.txt";
    const std::string cmd = kCli + " " + args + " > " + out_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("generate butterfly writes the expected files") {
    TempDir dir("sing_cli_butterfly");
    RunResult r = run("generate --family butterfly --pairs 5 --n 200 --seed 7 --out " +
                      dir.path.string());
    CHECK(r.exit_code == 0);
    sing::SampleMatrix samples = sing::read_samples_csv((dir.path / "samples.csv").string());
    CHECK(samples.n == 200);
    CHECK(samples.d == 10);
    sing::UndirectedGraph truth = sing::graph_from_json(slurp(dir.path / "truth.json"));
    CHECK(truth.edge_count() == 5);
    CHECK(fs::exists(dir.path / "dataset.json"));
}

TEST_CASE("generate rejects unknown families with a usage error") {
    RunResult r = run("generate --family nosuch --n 10 --out /tmp/sing_cli_nosuch");
    CHECK(r.exit_code == 1);
}

TEST_CASE("sing subcommand learns the chain and eval scores it") {
    TempDir gen_dir("sing_cli_gauss");
    CHECK(run("generate --family gaussian --d 3 --chain --n 4000 --seed 3 --out " +
              gen_dir.path.string())
              .exit_code == 0);

    TempDir fit_dir("sing_cli_fit");
    RunResult r = run("sing --data " + (gen_dir.path / "samples.csv").string() +
                      " --beta 1 --out " + fit_dir.path.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(fit_dir.path / "report.json"));
    CHECK(fs::exists(fit_dir.path / "adjacency.csv"));
    CHECK(fs::exists(fit_dir.path / "omega_iter1.csv"));

    // The report carries the final edges; round-trip them into a graph file
    // for eval.
    const std::string report = slurp(fit_dir.path / "report.json");
    CHECK(report.find("final_edges") != std::string::npos);

    // eval on identical graphs is clean.
    RunResult same = run("eval --truth " + (gen_dir.path / "truth.json").string() +
                         " --estimate " + (gen_dir.path / "truth.json").string());
    CHECK(same.exit_code == 0);
    CHECK(same.output == "0,0\n");
}

TEST_CASE("eval counts asymmetric errors and rejects mismatched dimensions") {
    TempDir dir("sing_cli_eval");
    sing::UndirectedGraph truth(3);
    truth.add_edge(1, 2);
    truth.add_edge(2, 3);
    sing::UndirectedGraph est(3);
    est.add_edge(1, 2);
    est.add_edge(1, 3);
    {
        std::ofstream t(dir.path / "truth.json");
        t << sing::graph_to_json(truth);
        std::ofstream e(dir.path / "est.json");
        e << sing::graph_to_json(est);
        std::ofstream o(dir.path / "other.json");
        o << sing::graph_to_json(sing::UndirectedGraph(5));
    }
    RunResult r = run("eval --truth " + (dir.path / "truth.json").string() + " --estimate " +
                      (dir.path / "est.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output == "1,1\n");

    RunResult mismatch = run("eval --truth " + (dir.path / "truth.json").string() +
                             " --estimate " + (dir.path / "other.json").string());
    CHECK(mismatch.exit_code == 1);
}

TEST_CASE("trials with one repetition matches a single run") {
    TempDir dir("sing_cli_trials");
    {
        std::ofstream cfg(dir.path / "exp.json");
        cfg << R"({
          "dataset": {"family": "gaussian", "parameters": {"d": 3, "coupling": 0.2}},
          "sing": {"beta": 1, "seed": 11},
          "trials": 1,
          "n_values": [1500],
          "output_dir": ")"
            << (dir.path / "out").string() << R"("
        })";
    }
    RunResult r = run("trials --config " + (dir.path / "exp.json").string());
    CHECK(r.exit_code == 0);
    const std::string summary = slurp(dir.path / "out" / "summary.csv");
    CHECK(summary.find("n,mean_type1,ci_type1,mean_type2,ci_type2") == 0);
    CHECK(summary.find("1500,") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "trials.csv"));
}

TEST_CASE("end-to-end determinism: identical config gives identical reports") {
    TempDir gen_dir("sing_cli_det");
    CHECK(run("generate --family butterfly --pairs 2 --n 800 --seed 5 --out " +
              gen_dir.path.string())
              .exit_code == 0);
    TempDir a("sing_cli_det_a"), b("sing_cli_det_b");
    const std::string base = "sing --data " + (gen_dir.path / "samples.csv").string() +
                             " --beta 2 --seed 5 --out ";
    CHECK(run(base + a.path.string()).exit_code == 0);
    CHECK(run(base + b.path.string()).exit_code == 0);
    CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));
    CHECK(slurp(a.path / "adjacency.csv") == slurp(b.path / "adjacency.csv"));
}

TEST_CASE("lorenz96 generation defaults to 3000 rows") {
    TempDir dir("sing_cli_l96");
    // Shortened horizon keeps this a smoke test; the stride and burn-in are
    // scaled down with it.
    RunResult r = run("generate --family lorenz96 --n 50 --t-end 30 --burn-in 10 "
                      "--subsample 10 --seed 1 --out " +
                      dir.path.string());
    CHECK(r.exit_code == 0);
    sing::SampleMatrix samples = sing::read_samples_csv((dir.path / "samples.csv").string());
    CHECK(samples.n == 50);
    CHECK(samples.d == 15);
}

TEST_CASE("trial summaries re-aggregate to their own records") {
    sing::ExperimentConfig cfg;
    cfg.family = "gaussian";
    cfg.parameters = {{"d", 3.0}, {"coupling", 0.2}};
    cfg.sing.beta = 1;
    cfg.sing.seed = 21;
    cfg.trials = 5;
    cfg.n_values = {400, 800};
    sing::TrialSummary summary = sing::run_trials(cfg);
    REQUIRE(summary.rows.size() == 2);
    for (const auto& row : summary.rows) {
        double m1 = 0.0, m2 = 0.0;
        int count = 0;
        for (const auto& rec : summary.records) {
            if (rec.n != row.n || rec.failed) continue;
            m1 += rec.type1;
            m2 += rec.type2;
            ++count;
        }
        REQUIRE(count == 5);
        CHECK(row.mean_type1 == doctest::Approx(m1 / count));
        CHECK(row.mean_type2 == doctest::Approx(m2 / count));
    }
    // Identical config reruns identically.
    sing::TrialSummary again = sing::run_trials(cfg);
    REQUIRE(again.records.size() == summary.records.size());
    for (std::size_t i = 0; i < summary.records.size(); ++i) {
        CHECK(again.records[i].type1 == summary.records[i].type1);
        CHECK(again.records[i].type2 == summary.records[i].type2);
    }
}

TEST_CASE("experiment config defaults and the lorenz96 offset preset") {
    sing::ExperimentConfig plain = sing::experiment_from_json(R"({
      "dataset": {"family": "gaussian"},
      "sing": {"beta": 1},
      "n": 100
    })");
    CHECK(plain.sing.tau0 == 0.0);
    CHECK(plain.sing.c == 1.0);
    CHECK(plain.n_values == std::vector<std::size_t>{100});

    sing::ExperimentConfig lorenz = sing::experiment_from_json(R"({
      "dataset": {"family": "lorenz96"},
      "sing": {"beta": 2},
      "n": 3000
    })");
    CHECK(lorenz.sing.tau0 == 0.1);

    sing::ExperimentConfig overridden = sing::experiment_from_json(R"({
      "dataset": {"family": "lorenz96"},
      "sing": {"beta": 2, "tau0": 0.05},
      "n": 3000
    })");
    CHECK(overridden.sing.tau0 == 0.05);
}
