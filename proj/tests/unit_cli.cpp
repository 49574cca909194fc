#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "entot/io.hpp"
#include "entot/scenarios.hpp"

using namespace entot;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "entot_cli_tests";
  fs::create_directories(dir);
  return dir;
}

RunResult run(const std::string& args) {
  fs::path capture = work_dir() / "stdout.txt";
  std::string cmd = std::string(ENTOT_CLI_PATH) + " " + args + " > " + capture.string() + " 2>" +
                    (work_dir() / "stderr.txt").string();
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = raw == -1 ? -1 : WEXITSTATUS(raw);
  r.out = slurp(capture);
  return r;
}

void put(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("transport subcommand reproduces the unit-shift distance") {
  fs::path dir = work_dir();
  put(dir / "mu.json", R"({"points": [[0.0], [1.0]], "weights": [0.5, 0.5]})");
  put(dir / "nu.json", R"({"points": [[1.0], [2.0]], "weights": [0.5, 0.5]})");
  RunResult r = run("ot " + (dir / "mu.json").string() + " " + (dir / "nu.json").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1\n");
  RunResult js = run("ot " + (dir / "mu.json").string() + " " + (dir / "nu.json").string() +
                     " --format json");
  CHECK(js.out.find("\"wasserstein\": 1") != std::string::npos);
}

TEST_CASE("generation is deterministic byte for byte") {
  fs::path dir = work_dir();
  ShiftConfig cfg;
  cfg.kind = ShiftKind::Entangling;
  cfg.points_per_domain = 16;
  cfg.seed = 4;
  put(dir / "scen.json", shift_config_to_json(cfg));
  RunResult a = run("gen --config " + (dir / "scen.json").string());
  RunResult b = run("gen --config " + (dir / "scen.json").string());
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"source\"") != std::string::npos);
  RunResult c = run("gen --config " + (dir / "scen.json").string() + " --seed 5");
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("verification accepts measure files and reports every bound") {
  fs::path dir = work_dir();
  ShiftConfig cfg;
  cfg.kind = ShiftKind::Covariate;
  cfg.points_per_domain = 20;
  cfg.seed = 8;
  Scenario sc = generate(cfg);
  put(dir / "p.json", joint_to_json(sc.source));
  put(dir / "q.json", joint_to_json(sc.target));
  RunResult r = run("verify --source " + (dir / "p.json").string() + " --target " +
                    (dir / "q.json").string() + " --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("bound_id,lhs,rhs,slack,passed,context\n", 0) == 0);
  size_t lines = 0;
  for (char ch : r.out)
    if (ch == '\n') ++lines;
  CHECK(lines == 19);  // header plus one row per suite check
}

TEST_CASE("training writes a history csv and a model file") {
  fs::path dir = work_dir();
  ShiftConfig scfg;
  scfg.kind = ShiftKind::Covariate;
  scfg.points_per_domain = 24;
  scfg.seed = 3;
  put(dir / "scen.json", shift_config_to_json(scfg));
  TrainConfig tcfg;
  tcfg.loss = TrainLoss::CrossEntropy;
  tcfg.epochs = 2;
  tcfg.batch_size = 12;
  put(dir / "train.json", train_config_to_json(tcfg));
  RunResult r = run("train --scenario " + (dir / "scen.json").string() + " --config " +
                    (dir / "train.json").string() + " --model-out " +
                    (dir / "model.json").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("epoch,src_acc,tgt_acc", 0) == 0);
  CHECK(fs::exists(dir / "model.json"));
}

TEST_CASE("entanglement reports come back in the requested format") {
  fs::path dir = work_dir();
  ShiftConfig cfg;
  cfg.kind = ShiftKind::Entangling;
  cfg.points_per_domain = 20;
  cfg.seed = 10;
  put(dir / "scen.json", shift_config_to_json(cfg));
  RunResult r = run("entangle --scenario " + (dir / "scen.json").string() +
                    " --seed 2 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"label_entanglement\"") != std::string::npos);
  CHECK(r.out.find("\"oub\"") != std::string::npos);
}

TEST_CASE("gaussian subcommand certifies the identity") {
  fs::path dir = work_dir();
  put(dir / "pair.json",
      R"({"mu": [0.0, 0.0], "mu_prime": [3.0, 4.0], "sigma": [[1.0, 0.0], [0.0, 1.0]],
          "scale": 1.0, "dim_x": 1})");
  RunResult r = run("gaussian " + (dir / "pair.json").string() + " --samples 5000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("joint,label_term") != std::string::npos);
  CHECK(r.out.find("25,") != std::string::npos);
}

TEST_CASE("usage errors exit with the input code") {
  CHECK(run("").exit_code == 2);
  CHECK(run("bogus").exit_code == 2);
  CHECK(run("verify").exit_code == 2);
  CHECK(run("ot /nonexistent/a.json /nonexistent/b.json").exit_code == 2);
  fs::path dir = work_dir();
  put(dir / "bad.json", R"({"kind": "covariate", "unknown_knob": 1})");
  CHECK(run("gen --config " + (dir / "bad.json").string()).exit_code == 2);
  CHECK(run("--help").exit_code == 0);
}
