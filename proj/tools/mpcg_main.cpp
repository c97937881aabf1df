// mpcg command-line driver: generate problem sets, train a precision
// policy, and benchmark RL-CG against the fp64-CG baseline.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mpcg/errors.hpp"
#include "mpcg/experiment.hpp"
#include "mpcg/kernels.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string scale;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "JSON config file")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--mode", opts.mode, "emulation mode: strict|fast");
  cmd->add_option("--scale", opts.scale, "problem scale: desk|paper");
  cmd->add_option("--seed", opts.seed, "seed override")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

mpcg::ExperimentConfig make_config(const CommonOpts& opts) {
  mpcg::ExperimentConfig cfg = mpcg::load_config(opts.config_path);
  if (!opts.scale.empty()) mpcg::apply_scale(cfg, opts.scale);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.mode.empty())
    cfg.cg.emulation_mode = mpcg::parse_emulation_mode(opts.mode);
  if (opts.seed_set) {
    cfg.seed = opts.seed;
    cfg.train.seed = opts.seed;
  }
  cfg.validate();
  return cfg;
}

std::vector<mpcg::ProblemInstance> problems_for(
    const mpcg::ExperimentConfig& cfg, const std::string& problems_dir,
    bool test_set) {
  if (!problems_dir.empty()) return mpcg::load_problem_set(problems_dir, cfg);
  const std::uint64_t base =
      test_set ? cfg.seed + mpcg::kTestSeedOffset : cfg.seed;
  const int count = test_set ? cfg.n_test : cfg.n_train;
  return mpcg::make_problem_set(cfg.problem_options(), count, base);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-precision CG with learned precision selection"};
  app.require_subcommand(1);

  CommonOpts gen_opts, train_opts, bench_opts;
  std::string train_problems_dir, bench_problems_dir, policy_path;

  CLI::App* gen = app.add_subcommand("gen", "materialize train/test sets");
  add_common(gen, gen_opts);

  CLI::App* train = app.add_subcommand("train", "train the precision policy");
  add_common(train, train_opts);
  train->add_option("--problems", train_problems_dir,
                    "load training problems from a gen directory");

  CLI::App* bench =
      app.add_subcommand("bench", "benchmark RL-CG against fp64-CG");
  add_common(bench, bench_opts);
  bench->add_option("--policy", policy_path, "trained policy file")->required();
  bench->add_option("--problems", bench_problems_dir,
                    "load test problems from a gen directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const auto cfg = make_config(gen_opts);
      const auto out = mpcg::run_gen(cfg);
      std::printf("wrote %d train + %d test instances under %s\n", out.n_train,
                  out.n_test, cfg.out_dir.c_str());
    } else if (train->parsed()) {
      const auto cfg = make_config(train_opts);
      const auto set = problems_for(cfg, train_problems_dir, false);
      if (set.empty()) throw mpcg::ConfigError("training set is empty");
      const auto out = mpcg::run_train(cfg, set);
      std::printf("trained %lld episodes over %zu matrices -> %s\n",
                  static_cast<long long>(out.policy.trained_episodes),
                  set.size(), out.policy_path.c_str());
    } else if (bench->parsed()) {
      const auto cfg = make_config(bench_opts);
      const auto set = problems_for(cfg, bench_problems_dir, true);
      if (set.empty()) throw mpcg::ConfigError("test set is empty");
      const auto policy = mpcg::load_policy(policy_path);
      const auto out = mpcg::run_bench(cfg, set, policy);
      for (const char* solver : {"rl-cg", "fp64-cg"}) {
        const auto& err = out.aggregates.at(solver).at("rel_error");
        const auto& its = out.aggregates.at(solver).at("iterations");
        std::printf("%-8s mean error %.3e  mean iterations %.1f\n", solver,
                    err.mean, its.mean);
      }
      std::printf("reports under %s/bench (backend: %s)\n",
                  cfg.out_dir.c_str(),
                  mpcg::kernels::to_string(mpcg::kernels::active_backend()));
    }
  } catch (const mpcg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const mpcg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
