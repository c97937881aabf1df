// End-to-end CLI checks through a real subprocess: exit codes and the
// gen -> train -> bench pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(MPCG_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("cli pipeline and exit codes") {
  TempDir tmp("mpcg_cli_test");
  const fs::path cfg_path = tmp.path / "config.json";
  write_file(cfg_path, R"({
    "family": "poisson2d",
    "n_train": 1,
    "n_test": 1,
    "poisson": {"nx": 4, "ny": 4},
    "cost_setting": "C1",
    "cg": {"max_iters": 50, "min_iters": 2},
    "train": {"episodes": 2},
    "seed": 7,
    "out_dir": ")" + (tmp.path / "out").string() + R"("
  })");

  SUBCASE("happy path: gen, train, bench") {
    CHECK(run_cli("gen -c " + cfg_path.string()) == 0);
    CHECK(fs::exists(tmp.path / "out" / "problems" / "train" / "manifest.json"));
    CHECK(run_cli("train -c " + cfg_path.string() + " --problems " +
                  (tmp.path / "out" / "problems" / "train").string()) == 0);
    const fs::path policy = tmp.path / "out" / "policy.json";
    CHECK(fs::exists(policy));
    CHECK(run_cli("bench -c " + cfg_path.string() + " --policy " +
                  policy.string() + " --problems " +
                  (tmp.path / "out" / "problems" / "test").string()) == 0);
    CHECK(fs::exists(tmp.path / "out" / "bench" / "results.csv"));
    CHECK(fs::exists(tmp.path / "out" / "bench" / "report.json"));
  }

  SUBCASE("missing config file is an I/O error") {
    CHECK(run_cli("gen -c /no/such/config.json") == 2);
  }

  SUBCASE("malformed config is a config error") {
    const fs::path bad = tmp.path / "bad.json";
    write_file(bad, "{ not json");
    CHECK(run_cli("gen -c " + bad.string()) == 1);
    const fs::path bad2 = tmp.path / "bad2.json";
    write_file(bad2, R"({"cg": {"tol": 42.0}})");
    CHECK(run_cli("gen -c " + bad2.string()) == 1);
  }

  SUBCASE("missing required options are config errors") {
    CHECK(run_cli("gen") == 1);
    CHECK(run_cli("bench -c " + cfg_path.string()) == 1);  // no --policy
    CHECK(run_cli("frobnicate") == 1);
  }

  SUBCASE("bench without a policy file is an I/O error") {
    CHECK(run_cli("bench -c " + cfg_path.string() +
                  " --policy /no/such/policy.json") == 2);
  }

  SUBCASE("unwritable output directory is an I/O error") {
    CHECK(run_cli("gen -c " + cfg_path.string() +
                  " --out /proc/mpcg_not_writable") == 2);
  }

  SUBCASE("train generates problems inline when no directory is given") {
    CHECK(run_cli("train -c " + cfg_path.string()) == 0);
    CHECK(fs::exists(tmp.path / "out" / "policy.json"));
    CHECK(fs::exists(tmp.path / "out" / "training_log.csv"));
  }

  SUBCASE("mode and scale overrides are validated") {
    CHECK(run_cli("gen -c " + cfg_path.string() + " --mode sloppy") == 1);
    CHECK(run_cli("gen -c " + cfg_path.string() + " --scale galactic") == 1);
  }

  SUBCASE("help exits zero") { CHECK(run_cli("--help") == 0); }
}
