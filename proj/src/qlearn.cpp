#include "mpcg/qlearn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "mpcg/errors.hpp"

namespace mpcg {

double MdpConfig::residual_bin_width() const {
  return -std::log10(eps_min) / residual_bins;
}

int discretize(int k, double rho, const MdpConfig& mdp) {
  const int per_bin = (mdp.max_iters + mdp.iteration_bins - 1) / mdp.iteration_bins;
  const int i = std::min(k / per_bin, mdp.iteration_bins - 1);
  const double capped = std::max(rho, mdp.eps_min);
  const int j = std::min(
      static_cast<int>(-std::log10(capped) / mdp.residual_bin_width()),
      mdp.residual_bins - 1);
  return i * mdp.residual_bins + std::max(j, 0);
}

double reward(double rho_next, const PrecisionAction& action,
              const RewardConfig& rcfg) {
  const double log_floor = -std::log10(rcfg.eps_min);
  const double accuracy =
      std::min(-std::log10(std::max(rho_next, rcfg.eps_min)), log_floor);
  double cost_sum = 0.0;
  for (int op = 0; op < kNumOps; ++op) cost_sum += rcfg.cost_of(action[op]);
  const double bonus = rho_next < rcfg.tol ? rcfg.w3 : 0.0;
  return rcfg.w1 * accuracy - rcfg.w2 * cost_sum + bonus;
}

double epsilon_schedule(int episode, const TrainConfig& tcfg) {
  const double eps =
      tcfg.eps0 * (1.0 - static_cast<double>(episode) / tcfg.episodes);
  return std::max(eps, tcfg.eps_floor);
}

QPolicy::QPolicy(const MdpConfig& m, std::vector<FormatTag> precisions)
    : mdp(m), precision_set(std::move(precisions)) {
  for (auto& t : tables)
    t.assign(static_cast<std::size_t>(mdp.state_count()) *
                 precision_set.size(),
             0.0);
}

int greedy_index(const QPolicy& q, int op, int state,
                 const std::array<double, 6>& cost) {
  const int np = static_cast<int>(q.precision_set.size());
  int best = 0;
  for (int p = 1; p < np; ++p) {
    const double qv = q.q(op, state, p);
    const double qb = q.q(op, state, best);
    if (qv > qb) {
      best = p;
    } else if (qv == qb) {
      const double cv = cost[static_cast<int>(q.precision_set[p])];
      const double cb = cost[static_cast<int>(q.precision_set[best])];
      if (cv < cb) best = p;
    }
  }
  return best;
}

PrecisionAction greedy_action(const QPolicy& q, int state,
                              const std::array<double, 6>& cost) {
  PrecisionAction a;
  for (int op = 0; op < kNumOps; ++op)
    a[op] = q.precision_set[greedy_index(q, op, state, cost)];
  return a;
}

PrecisionAction select_action(const QPolicy& q, int state, double epsilon,
                              const std::array<double, 6>& cost, Rng& rng) {
  PrecisionAction a;
  for (int op = 0; op < kNumOps; ++op) {
    if (rng.uniform() < epsilon) {
      a[op] = q.precision_set[rng.uniform_index(q.precision_set.size())];
    } else {
      a[op] = q.precision_set[greedy_index(q, op, state, cost)];
    }
  }
  return a;
}

namespace {

int set_index(const QPolicy& q, FormatTag t) {
  for (std::size_t p = 0; p < q.precision_set.size(); ++p)
    if (q.precision_set[p] == t) return static_cast<int>(p);
  throw std::invalid_argument("action format not in precision set");
}

double row_max(const QPolicy& q, int op, int state) {
  const int np = static_cast<int>(q.precision_set.size());
  double m = q.q(op, state, 0);
  for (int p = 1; p < np; ++p) m = std::max(m, q.q(op, state, p));
  return m;
}

}  // namespace

void q_update(QPolicy& q, int state, const PrecisionAction& action, double r,
              std::optional<int> state_next, double alpha, double gamma) {
  for (int op = 0; op < kNumOps; ++op) {
    const int p = set_index(q, action[op]);
    const double future = state_next ? gamma * row_max(q, op, *state_next) : 0.0;
    double& cell = q.q(op, state, p);
    cell += alpha * (r + future - cell);
  }
}

PrecisionPolicy greedy_policy(const QPolicy& q,
                              const std::array<double, 6>& cost) {
  return [&q, cost](int k, double rho) {
    return greedy_action(q, discretize(k, rho, q.mdp), cost);
  };
}

QPolicy train(const std::vector<TrainProblem>& problems, const MdpConfig& mdp,
              const RewardConfig& rcfg, const TrainConfig& tcfg,
              const CgConfig& cg, std::vector<EpisodeLog>* log) {
  if (problems.empty()) throw std::invalid_argument("train: no problems");
  QPolicy q(mdp, cg.precision_set);
  Rng rng(tcfg.seed);

  std::vector<int> schedule;
  schedule.reserve(static_cast<std::size_t>(problems.size()) * tcfg.episodes);
  for (std::size_t m = 0; m < problems.size(); ++m)
    for (int e = 0; e < tcfg.episodes; ++e)
      schedule.push_back(static_cast<int>(m));
  if (tcfg.shuffle_interleave) {
    for (std::size_t i = schedule.size(); i > 1; --i)
      std::swap(schedule[i - 1], schedule[rng.uniform_index(i)]);
  }

  const int total_episodes = static_cast<int>(schedule.size());
  TrainConfig global = tcfg;
  global.episodes = total_episodes;

  for (int e = 0; e < total_episodes; ++e) {
    const TrainProblem& prob = problems[schedule[e]];
    const double epsilon = epsilon_schedule(e, global);
    CgStepper stepper(*prob.a, *prob.b, *prob.m, cg);
    double cum_reward = 0.0;
    SolveStatus status = SolveStatus::MaxIters;
    int iters = 0;

    for (int k = 0; k < cg.max_iters; ++k) {
      const double rho_k = stepper.rho();
      const int s = discretize(k, rho_k, mdp);
      const PrecisionAction action = select_action(q, s, epsilon, rcfg.cost, rng);
      const CgStepper::Step step = stepper.step(action);
      iters = k + 1;
      if (step.breakdown) {
        // Terminal update with the reward at the last finite residual.
        const double r = reward(stepper.rho(), action, rcfg);
        cum_reward += r;
        q_update(q, s, action, r, std::nullopt, tcfg.learning_rate,
                 tcfg.discount);
        status = SolveStatus::Breakdown;
        break;
      }
      const double r = reward(step.rho_next, action, rcfg);
      cum_reward += r;
      if (step.converged) {
        q_update(q, s, action, r, std::nullopt, tcfg.learning_rate,
                 tcfg.discount);
        status = SolveStatus::Converged;
        break;
      }
      const int s_next = discretize(k + 1, step.rho_next, mdp);
      q_update(q, s, action, r, s_next, tcfg.learning_rate, tcfg.discount);
    }
    q.trained_episodes += 1;
    if (log)
      log->push_back({e, schedule[e], epsilon, iters, stepper.rho(), status,
                      cum_reward});
  }
  return q;
}

// ---------------------------------------------------------------------
// Persistence

namespace {

constexpr int kPolicyVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t policy_checksum(const QPolicy& q) {
  std::uint64_t h = 14695981039346656037ull;
  h = fnv1a(h, kPolicyVersion);
  h = fnv1a(h, static_cast<std::uint64_t>(q.mdp.iteration_bins));
  h = fnv1a(h, static_cast<std::uint64_t>(q.mdp.residual_bins));
  h = fnv1a(h, static_cast<std::uint64_t>(q.mdp.max_iters));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(q.mdp.eps_min));
  for (FormatTag t : q.precision_set)
    h = fnv1a(h, static_cast<std::uint64_t>(t));
  h = fnv1a(h, static_cast<std::uint64_t>(q.trained_episodes));
  for (const auto& table : q.tables)
    for (double v : table) h = fnv1a(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

constexpr std::array<const char*, kNumOps> kTableNames = {
    "matvec", "precond", "dot_pq", "dot_rz"};

}  // namespace

void save_policy(const QPolicy& q, const std::string& path) {
  nlohmann::json j;
  j["format"] = "mpcg-qpolicy";
  j["version"] = kPolicyVersion;
  j["mdp"] = {{"iteration_bins", q.mdp.iteration_bins},
              {"residual_bins", q.mdp.residual_bins},
              {"max_iters", q.mdp.max_iters},
              {"eps_min", q.mdp.eps_min}};
  std::vector<std::string> tags;
  for (FormatTag t : q.precision_set) tags.emplace_back(to_string(t));
  j["precision_set"] = tags;
  j["trained_episodes"] = q.trained_episodes;
  const int np = static_cast<int>(q.precision_set.size());
  for (int op = 0; op < kNumOps; ++op) {
    nlohmann::json rows = nlohmann::json::array();
    for (int s = 0; s < q.mdp.state_count(); ++s) {
      nlohmann::json row = nlohmann::json::array();
      for (int p = 0; p < np; ++p) row.push_back(q.q(op, s, p));
      rows.push_back(std::move(row));
    }
    j["tables"][kTableNames[op]] = std::move(rows);
  }
  char sum[32];
  std::snprintf(sum, sizeof(sum), "fnv1a:%016llx",
                static_cast<unsigned long long>(policy_checksum(q)));
  j["checksum"] = sum;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

namespace {

QPolicy parse_policy(const nlohmann::json& j) {
  MdpConfig mdp;
  mdp.iteration_bins = j.at("mdp").at("iteration_bins").get<int>();
  mdp.residual_bins = j.at("mdp").at("residual_bins").get<int>();
  mdp.max_iters = j.at("mdp").at("max_iters").get<int>();
  mdp.eps_min = j.at("mdp").at("eps_min").get<double>();
  if (mdp.iteration_bins < 1 || mdp.residual_bins < 1 ||
      !(mdp.eps_min > 0.0 && mdp.eps_min < 1.0))
    throw CorruptFile("invalid mdp configuration");

  std::vector<FormatTag> precisions;
  for (const auto& tag : j.at("precision_set"))
    precisions.push_back(parse_format_tag(tag.get<std::string>()));
  if (precisions.empty()) throw CorruptFile("empty precision set");

  QPolicy q(mdp, precisions);
  q.trained_episodes = j.at("trained_episodes").get<std::int64_t>();
  for (int op = 0; op < kNumOps; ++op) {
    const auto& rows = j.at("tables").at(kTableNames[op]);
    if (static_cast<int>(rows.size()) != mdp.state_count())
      throw FormatVersionMismatch("table shape does not match mdp config");
    for (int s = 0; s < mdp.state_count(); ++s) {
      const auto& row = rows[s];
      if (row.size() != precisions.size())
        throw FormatVersionMismatch("table width does not match precision set");
      for (std::size_t p = 0; p < precisions.size(); ++p) {
        const double v = row[p].get<double>();
        if (!std::isfinite(v)) throw CorruptFile("non-finite Q-value");
        q.q(op, s, static_cast<int>(p)) = v;
      }
    }
  }
  char expect[32];
  std::snprintf(expect, sizeof(expect), "fnv1a:%016llx",
                static_cast<unsigned long long>(policy_checksum(q)));
  if (j.value("checksum", "") != expect)
    throw CorruptFile("policy checksum mismatch");
  return q;
}

}  // namespace

QPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.value("format", "") != "mpcg-qpolicy" ||
        j.value("version", -1) != kPolicyVersion)
      throw FormatVersionMismatch("unsupported policy file version");
    return parse_policy(j);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile("policy parse error: " + std::string(e.what()));
  }
}

}  // namespace mpcg
