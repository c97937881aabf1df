#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mpcg/problems.hpp"
#include "mpcg/qlearn.hpp"
#include "mpcg/stats.hpp"

namespace mpcg {

/// Per-format operation costs entering the reward's cost term.
struct CostSetting {
  std::string name;
  std::array<double, 6> cost{};  // indexed by FormatTag

  static CostSetting c1();
  static CostSetting c2();
  static CostSetting custom(const std::map<std::string, double>& entries);
};

struct ExperimentConfig {
  ProblemFamily family = ProblemFamily::Poisson2d;
  int n_train = 10;
  int n_test = 20;
  SparseRandomSpec sparse;
  int nx = 40;
  int ny = 40;
  CostSetting cost = CostSetting::c1();
  double w1 = 1.0;
  double w2 = 0.1;
  double w3 = 10.0;
  MdpConfig mdp;
  TrainConfig train;
  CgConfig cg;
  double ilut_drop_tol = 1e-4;
  double ilut_fill = 10.0;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  RewardConfig reward_config() const;
  ProblemSetOptions problem_options() const;
  void validate() const;  // throws ConfigError
};

/// Loads a config from JSON; unknown keys are rejected so typos do not
/// silently fall back to defaults. `scale` is "desk" or "paper".
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
void apply_scale(ExperimentConfig& cfg, const std::string& scale);

/// Problem-set materialization (gen) and reload (train/bench from disk).
void write_problem_set(const std::string& dir,
                       const std::vector<ProblemInstance>& set);
std::vector<ProblemInstance> load_problem_set(const std::string& dir,
                                              const ExperimentConfig& cfg);

struct GenOutput {
  std::string train_dir;
  std::string test_dir;
  int n_train;
  int n_test;
};

/// gen: materialize train and test sets under out_dir/problems.
GenOutput run_gen(const ExperimentConfig& cfg);

struct TrainOutput {
  QPolicy policy;
  std::vector<EpisodeLog> log;
  std::string policy_path;
  std::string log_path;
};

/// train: Q-learning over the training set; writes policy + episode log.
TrainOutput run_train(const ExperimentConfig& cfg,
                      const std::vector<ProblemInstance>& train_set);

struct BenchRow {
  int matrix_id;
  std::string solver;  // "rl-cg" or "fp64-cg"
  SolveStatus status;
  int iterations;
  double rel_error;
  double final_rho;
  std::array<std::int64_t, 6> format_counts{};  // decisions per FormatTag
};

struct BenchOutput {
  std::vector<BenchRow> rows;
  std::map<std::string, std::map<std::string, Summary>> aggregates;
  // solver -> format tag -> percent of decisions
  std::map<std::string, std::array<double, 6>> distribution;
  std::vector<std::string> files;
};

/// bench: RL-CG (greedy policy) vs the fp64-CG baseline on the test
/// set; writes per-matrix rows, aggregate statistics, the precision
/// distribution and per-iteration traces for the first matrices.
BenchOutput run_bench(const ExperimentConfig& cfg,
                      const std::vector<ProblemInstance>& test_set,
                      const QPolicy& policy, int trace_count = 3);

double relative_error(const DenseVector& x, const DenseVector& x_true);

}  // namespace mpcg
