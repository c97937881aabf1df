#include "mpcg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "mpcg/errors.hpp"
#include "mpcg/matrix_market.hpp"
#include "mpcg/sparse_kernels.hpp"

namespace mpcg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRlSolver = "rl-cg";
constexpr const char* kBaselineSolver = "fp64-cg";

std::string instance_name(const char* stem, int id, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", stem, id, ext);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());
}

}  // namespace

CostSetting CostSetting::c1() {
  CostSetting c;
  c.name = "C1";
  c.cost[static_cast<int>(FormatTag::bf16)] = 0.6;
  c.cost[static_cast<int>(FormatTag::fp16)] = 0.8;
  c.cost[static_cast<int>(FormatTag::tf32)] = 0.8;
  c.cost[static_cast<int>(FormatTag::fp32)] = 1.0;
  c.cost[static_cast<int>(FormatTag::fp64)] = 2.0;
  return c;
}

CostSetting CostSetting::c2() {
  CostSetting c;
  c.name = "C2";
  c.cost[static_cast<int>(FormatTag::bf16)] = 0.4;
  c.cost[static_cast<int>(FormatTag::fp16)] = 0.5;
  c.cost[static_cast<int>(FormatTag::tf32)] = 0.5;
  c.cost[static_cast<int>(FormatTag::fp32)] = 1.5;
  c.cost[static_cast<int>(FormatTag::fp64)] = 3.0;
  return c;
}

CostSetting CostSetting::custom(const std::map<std::string, double>& entries) {
  CostSetting c;
  c.name = "custom";
  for (const auto& [name, cost] : entries)
    c.cost[static_cast<int>(parse_format_tag(name))] = cost;
  return c;
}

RewardConfig ExperimentConfig::reward_config() const {
  RewardConfig r;
  r.w1 = w1;
  r.w2 = w2;
  r.w3 = w3;
  r.tol = cg.tol;
  r.eps_min = mdp.eps_min;
  r.cost = cost.cost;
  return r;
}

ProblemSetOptions ExperimentConfig::problem_options() const {
  ProblemSetOptions o;
  o.family = family;
  o.sparse = sparse;
  o.nx = nx;
  o.ny = ny;
  o.ilut_drop_tol = ilut_drop_tol;
  o.ilut_fill = ilut_fill;
  return o;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n_train < 1) fail("n_train must be >= 1");
  if (n_test < 1) fail("n_test must be >= 1");
  if (!(cg.tol > 0.0 && cg.tol < 1.0)) fail("cg.tol must be in (0, 1)");
  if (cg.max_iters < 1) fail("cg.max_iters must be >= 1");
  if (cg.min_iters < 0 || cg.min_iters >= cg.max_iters)
    fail("cg.min_iters must be in [0, max_iters)");
  if (cg.precision_set.empty()) fail("precision set must be nonempty");
  for (FormatTag t : cg.precision_set)
    if (!(cost.cost[static_cast<int>(t)] > 0.0))
      fail(std::string("cost missing or nonpositive for ") + to_string(t));
  if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0) fail("reward weights must be >= 0");
  if (mdp.iteration_bins < 1 || mdp.residual_bins < 1)
    fail("mdp bins must be >= 1");
  if (!(mdp.eps_min > 0.0 && mdp.eps_min < 1.0))
    fail("mdp.eps_min must be in (0, 1)");
  if (mdp.max_iters != cg.max_iters)
    fail("mdp.max_iters must equal cg.max_iters");
  if (train.episodes < 0) fail("train.episodes must be >= 0");
  if (!(train.learning_rate > 0.0 && train.learning_rate <= 1.0))
    fail("train.learning_rate must be in (0, 1]");
  if (!(train.discount >= 0.0 && train.discount < 1.0))
    fail("train.discount must be in [0, 1)");
  if (!(train.eps0 > 0.0 && train.eps0 <= 1.0))
    fail("train.eps0 must be in (0, 1]");
  if (train.eps_floor < 0.0 || train.eps_floor > train.eps0)
    fail("train.eps_floor must be in [0, eps0]");
  if (sparse.n < 1 || sparse.n_pairs < 0) fail("sparse dimensions invalid");
  if (!(sparse.beta_range.first > 0.0 &&
        sparse.beta_range.first <= sparse.beta_range.second))
    fail("sparse.beta_range invalid");
  if (!(sparse.sparsity_scale_range.first > 0.0 &&
        sparse.sparsity_scale_range.first <=
            sparse.sparsity_scale_range.second))
    fail("sparse.scale_range invalid");
  if (nx < 1 || ny < 1) fail("poisson grid invalid");
  if (!(ilut_drop_tol > 0.0)) fail("ilut.drop_tol must be > 0");
  if (!(ilut_fill >= 1.0)) fail("ilut.fill_factor must be >= 1");
}

namespace {

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

std::pair<double, double> parse_range(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(std::string(name) + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  ExperimentConfig cfg;
  try {
    check_keys(j, "config",
               {"family", "n_train", "n_test", "sparse", "poisson",
                "cost_setting", "reward", "mdp", "cg", "train", "ilut",
                "out_dir", "seed"});
    if (j.contains("family"))
      cfg.family = parse_family(j["family"].get<std::string>());
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.n_test = j.value("n_test", cfg.n_test);
    if (j.contains("sparse")) {
      const json& s = j["sparse"];
      check_keys(s, "sparse", {"n", "n_pairs", "beta_range", "scale_range"});
      cfg.sparse.n = s.value("n", cfg.sparse.n);
      cfg.sparse.n_pairs = s.value("n_pairs", cfg.sparse.n_pairs);
      if (s.contains("beta_range"))
        cfg.sparse.beta_range = parse_range(s["beta_range"], "beta_range");
      if (s.contains("scale_range"))
        cfg.sparse.sparsity_scale_range =
            parse_range(s["scale_range"], "scale_range");
    }
    if (j.contains("poisson")) {
      const json& p = j["poisson"];
      check_keys(p, "poisson", {"nx", "ny"});
      cfg.nx = p.value("nx", cfg.nx);
      cfg.ny = p.value("ny", cfg.ny);
    }
    if (j.contains("cost_setting")) {
      const json& c = j["cost_setting"];
      if (c.is_string()) {
        const std::string name = c.get<std::string>();
        if (name == "C1")
          cfg.cost = CostSetting::c1();
        else if (name == "C2")
          cfg.cost = CostSetting::c2();
        else
          throw ConfigError("cost_setting must be C1, C2, or a map");
      } else if (c.is_object()) {
        cfg.cost = CostSetting::custom(
            c.get<std::map<std::string, double>>());
      } else {
        throw ConfigError("cost_setting must be C1, C2, or a map");
      }
    }
    if (j.contains("reward")) {
      const json& r = j["reward"];
      check_keys(r, "reward", {"w1", "w2", "w3"});
      cfg.w1 = r.value("w1", cfg.w1);
      cfg.w2 = r.value("w2", cfg.w2);
      cfg.w3 = r.value("w3", cfg.w3);
    }
    if (j.contains("mdp")) {
      const json& m = j["mdp"];
      check_keys(m, "mdp", {"iteration_bins", "residual_bins", "eps_min"});
      cfg.mdp.iteration_bins = m.value("iteration_bins", cfg.mdp.iteration_bins);
      cfg.mdp.residual_bins = m.value("residual_bins", cfg.mdp.residual_bins);
      cfg.mdp.eps_min = m.value("eps_min", cfg.mdp.eps_min);
    }
    if (j.contains("cg")) {
      const json& c = j["cg"];
      check_keys(c, "cg", {"tol", "max_iters", "min_iters", "mode", "precisions"});
      cfg.cg.tol = c.value("tol", cfg.cg.tol);
      cfg.cg.max_iters = c.value("max_iters", cfg.cg.max_iters);
      cfg.cg.min_iters = c.value("min_iters", cfg.cg.min_iters);
      if (c.contains("mode"))
        cfg.cg.emulation_mode =
            parse_emulation_mode(c["mode"].get<std::string>());
      if (c.contains("precisions")) {
        cfg.cg.precision_set.clear();
        for (const auto& p : c["precisions"])
          cfg.cg.precision_set.push_back(
              parse_format_tag(p.get<std::string>()));
      }
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      check_keys(t, "train",
                 {"episodes", "learning_rate", "discount", "eps0", "eps_floor",
                  "shuffle_interleave"});
      cfg.train.episodes = t.value("episodes", cfg.train.episodes);
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.discount = t.value("discount", cfg.train.discount);
      cfg.train.eps0 = t.value("eps0", cfg.train.eps0);
      cfg.train.eps_floor = t.value("eps_floor", cfg.train.eps_floor);
      cfg.train.shuffle_interleave =
          t.value("shuffle_interleave", cfg.train.shuffle_interleave);
    }
    if (j.contains("ilut")) {
      const json& i = j["ilut"];
      check_keys(i, "ilut", {"drop_tol", "fill_factor"});
      cfg.ilut_drop_tol = i.value("drop_tol", cfg.ilut_drop_tol);
      cfg.ilut_fill = i.value("fill_factor", cfg.ilut_fill);
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ConfigError("config error: " + std::string(e.what()));
  }
  cfg.mdp.max_iters = cfg.cg.max_iters;
  cfg.train.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

void apply_scale(ExperimentConfig& cfg, const std::string& scale) {
  if (scale == "desk") {
    cfg.nx = cfg.ny = 40;
    cfg.sparse.n = 500;
    cfg.sparse.n_pairs = 500;
    cfg.n_test = 20;
    cfg.train.episodes = 50;
  } else if (scale == "paper") {
    cfg.nx = cfg.ny = 80;
    cfg.sparse.n = 5000;
    cfg.sparse.n_pairs = 5000;
    cfg.n_test = 100;
    cfg.train.episodes = 200;
  } else {
    throw ConfigError("scale must be desk or paper");
  }
}

void write_problem_set(const std::string& dir,
                       const std::vector<ProblemInstance>& set) {
  ensure_dir(dir);
  json manifest;
  manifest["instances"] = json::array();
  for (const ProblemInstance& inst : set) {
    const std::string mtx = instance_name("matrix", inst.id, "mtx");
    const std::string bfile = instance_name("b", inst.id, "txt");
    const std::string xfile = instance_name("xtrue", inst.id, "txt");
    write_matrix_market((fs::path(dir) / mtx).string(), inst.a, true);
    write_vector((fs::path(dir) / bfile).string(), inst.b);
    write_vector((fs::path(dir) / xfile).string(), inst.x_true);
    json entry = json::parse(inst.params_json);
    entry["id"] = inst.id;
    entry["files"] = {{"matrix", mtx}, {"b", bfile}, {"x_true", xfile}};
    manifest["instances"].push_back(std::move(entry));
  }
  auto out = open_out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
}

std::vector<ProblemInstance> load_problem_set(const std::string& dir,
                                              const ExperimentConfig& cfg) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw IoError("cannot open manifest in " + dir);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw IoError("manifest parse error: " + std::string(e.what()));
  }
  std::vector<ProblemInstance> set;
  for (const json& entry : manifest.at("instances")) {
    ProblemInstance inst;
    inst.id = entry.at("id").get<int>();
    inst.seed = entry.value("seed", 0ull);
    inst.params_json = entry.dump();
    const json& files = entry.at("files");
    inst.a = read_matrix_market(
        (fs::path(dir) / files.at("matrix").get<std::string>()).string());
    inst.b =
        read_vector((fs::path(dir) / files.at("b").get<std::string>()).string());
    inst.x_true = read_vector(
        (fs::path(dir) / files.at("x_true").get<std::string>()).string());
    inst.m = ilut_or_jacobi(inst.a, cfg.ilut_drop_tol, cfg.ilut_fill,
                            FormatTag::fp32);
    set.push_back(std::move(inst));
  }
  return set;
}

GenOutput run_gen(const ExperimentConfig& cfg) {
  const fs::path base = fs::path(cfg.out_dir) / "problems";
  GenOutput out;
  out.train_dir = (base / "train").string();
  out.test_dir = (base / "test").string();
  const auto train_set =
      make_problem_set(cfg.problem_options(), cfg.n_train, cfg.seed);
  const auto test_set = make_problem_set(cfg.problem_options(), cfg.n_test,
                                         cfg.seed + kTestSeedOffset);
  write_problem_set(out.train_dir, train_set);
  write_problem_set(out.test_dir, test_set);
  out.n_train = static_cast<int>(train_set.size());
  out.n_test = static_cast<int>(test_set.size());
  return out;
}

TrainOutput run_train(const ExperimentConfig& cfg,
                      const std::vector<ProblemInstance>& train_set) {
  std::vector<TrainProblem> problems;
  problems.reserve(train_set.size());
  for (const ProblemInstance& p : train_set)
    problems.push_back({&p.a, &p.b, &p.m});
  TrainOutput out;
  out.policy = train(problems, cfg.mdp, cfg.reward_config(), cfg.train, cfg.cg,
                     &out.log);
  ensure_dir(cfg.out_dir);
  out.policy_path = (fs::path(cfg.out_dir) / "policy.json").string();
  save_policy(out.policy, out.policy_path);
  out.log_path = (fs::path(cfg.out_dir) / "training_log.csv").string();
  auto log = open_out(out.log_path);
  log << "episode,problem,epsilon,iterations,final_rho,status,cumulative_"
         "reward\n";
  for (const EpisodeLog& e : out.log)
    log << e.episode << "," << e.problem << "," << format_double(e.epsilon)
        << "," << e.iterations << "," << format_double(e.final_rho) << ","
        << to_string(e.status) << "," << format_double(e.cumulative_reward)
        << "\n";
  return out;
}

double relative_error(const DenseVector& x, const DenseVector& x_true) {
  DenseVector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - x_true[i];
  return norm2_fp64(diff) / norm2_fp64(x_true);
}

namespace {

BenchRow make_row(int id, const char* solver, const SolveResult& res,
                  const DenseVector& x_true) {
  BenchRow row;
  row.matrix_id = id;
  row.solver = solver;
  row.status = res.status;
  row.iterations = res.iterations;
  row.rel_error = relative_error(res.x, x_true);
  row.final_rho = res.final_rho;
  for (const IterationRecord& rec : res.trace)
    for (int op = 0; op < kNumOps; ++op)
      ++row.format_counts[static_cast<int>(rec.action[op])];
  return row;
}

void write_rows_csv(const fs::path& path, const std::vector<BenchRow>& rows) {
  auto out = open_out(path);
  out << "matrix_id,solver,status,iterations,rel_error,final_rho";
  for (FormatTag t : kAllFormats) out << ",n_" << to_string(t);
  out << "\n";
  for (const BenchRow& r : rows) {
    out << r.matrix_id << "," << r.solver << "," << to_string(r.status) << ","
        << r.iterations << "," << format_double(r.rel_error) << ","
        << format_double(r.final_rho);
    for (std::int64_t c : r.format_counts) out << "," << c;
    out << "\n";
  }
}

}  // namespace

BenchOutput run_bench(const ExperimentConfig& cfg,
                      const std::vector<ProblemInstance>& test_set,
                      const QPolicy& policy, int trace_count) {
  if (test_set.empty()) throw ConfigError("bench: empty test set");
  if (policy.mdp.state_count() <= 0 ||
      !(policy.mdp == cfg.mdp) ||
      policy.precision_set != cfg.cg.precision_set)
    throw ConfigError("bench: policy incompatible with config");

  struct Solved {
    SolveResult rl;
    SolveResult baseline;
  };
  std::vector<Solved> solved(test_set.size());
  const PrecisionPolicy rl_policy = greedy_policy(policy, cfg.cost.cost);
  const PrecisionPolicy baseline = fixed_policy(FormatTag::fp64);

  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= test_set.size()) return;
      const ProblemInstance& inst = test_set[i];
      solved[i].rl = cg_solve(inst.a, inst.b, inst.m, rl_policy, cfg.cg);
      solved[i].baseline = cg_solve(inst.a, inst.b, inst.m, baseline, cfg.cg);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  BenchOutput out;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    out.rows.push_back(
        make_row(test_set[i].id, kRlSolver, solved[i].rl, test_set[i].x_true));
    out.rows.push_back(make_row(test_set[i].id, kBaselineSolver,
                                solved[i].baseline, test_set[i].x_true));
  }

  for (const char* solver : {kRlSolver, kBaselineSolver}) {
    std::vector<double> errors, iterations;
    std::array<std::int64_t, 6> counts{};
    for (const BenchRow& r : out.rows) {
      if (r.solver != solver) continue;
      errors.push_back(r.rel_error);
      iterations.push_back(static_cast<double>(r.iterations));
      for (int t = 0; t < 6; ++t) counts[t] += r.format_counts[t];
    }
    out.aggregates[solver]["rel_error"] = summarize(errors);
    out.aggregates[solver]["iterations"] = summarize(iterations);
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    std::array<double, 6> pct{};
    for (int t = 0; t < 6; ++t)
      pct[t] = total > 0 ? 100.0 * static_cast<double>(counts[t]) /
                               static_cast<double>(total)
                         : 0.0;
    out.distribution[solver] = pct;
  }

  const fs::path dir = fs::path(cfg.out_dir) / "bench";
  ensure_dir(dir);
  write_rows_csv(dir / "results.csv", out.rows);
  out.files.push_back((dir / "results.csv").string());

  {
    auto agg = open_out(dir / "aggregate_stats.csv");
    agg << "solver,metric,mean,std,min,max,p25,p75\n";
    for (const auto& [solver, metrics] : out.aggregates)
      for (const auto& [metric, s] : metrics)
        agg << solver << "," << metric << "," << format_double(s.mean) << ","
            << format_double(s.stddev) << "," << format_double(s.min) << ","
            << format_double(s.max) << "," << format_double(s.p25) << ","
            << format_double(s.p75) << "\n";
    out.files.push_back((dir / "aggregate_stats.csv").string());
  }
  {
    auto dist = open_out(dir / "precision_distribution.csv");
    dist << "solver";
    for (FormatTag t : kAllFormats) dist << "," << to_string(t);
    dist << "\n";
    for (const auto& [solver, pct] : out.distribution) {
      dist << solver;
      for (double p : pct) dist << "," << format_double(p);
      dist << "\n";
    }
    out.files.push_back((dir / "precision_distribution.csv").string());
  }
  for (std::size_t i = 0;
       i < std::min<std::size_t>(trace_count, test_set.size()); ++i) {
    const std::string rl_name = instance_name("trace_rl", test_set[i].id, "csv");
    const std::string base_name =
        instance_name("trace_fp64", test_set[i].id, "csv");
    write_trace_csv((dir / rl_name).string(), solved[i].rl.trace);
    write_trace_csv((dir / base_name).string(), solved[i].baseline.trace);
    out.files.push_back((dir / rl_name).string());
    out.files.push_back((dir / base_name).string());
  }

  json report;
  report["config"] = {{"family", to_string(cfg.family)},
                      {"cost_setting", cfg.cost.name},
                      {"mode", to_string(cfg.cg.emulation_mode)},
                      {"tol", cfg.cg.tol},
                      {"max_iters", cfg.cg.max_iters},
                      {"min_iters", cfg.cg.min_iters},
                      {"n_test", static_cast<int>(test_set.size())},
                      {"seed", cfg.seed}};
  for (const auto& [solver, metrics] : out.aggregates)
    for (const auto& [metric, s] : metrics)
      report["aggregates"][solver][metric] = {
          {"mean", s.mean}, {"std", s.stddev}, {"min", s.min},
          {"max", s.max},   {"p25", s.p25},    {"p75", s.p75}};
  for (const auto& [solver, pct] : out.distribution) {
    json d;
    for (FormatTag t : kAllFormats)
      d[to_string(t)] = pct[static_cast<int>(t)];
    report["precision_distribution"][solver] = std::move(d);
  }
  auto rep = open_out(dir / "report.json");
  rep << report.dump(2) << "\n";
  out.files.push_back((dir / "report.json").string());
  return out;
}

}  // namespace mpcg
