#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpcg/cg.hpp"
#include "mpcg/rng.hpp"

namespace mpcg {

/// State discretization of the solver MDP: iteration index binned into
/// `iteration_bins` even slices of [0, max_iters), residual ratio binned
/// on a log10 scale down to the floor `eps_min`.
struct MdpConfig {
  int iteration_bins = 10;
  int residual_bins = 10;
  int max_iters = 1000;
  double eps_min = 1e-16;

  int state_count() const { return iteration_bins * residual_bins; }
  double residual_bin_width() const;
  bool operator==(const MdpConfig&) const = default;
};

/// discretize(k, rho) -> flat state index i * residual_bins + j.
int discretize(int k, double rho, const MdpConfig& mdp);

/// Reward weights, convergence tolerance, and per-format cost table.
struct RewardConfig {
  double w1 = 1.0;
  double w2 = 0.1;
  double w3 = 10.0;
  double tol = 1e-6;
  double eps_min = 1e-16;
  std::array<double, 6> cost{};  // indexed by FormatTag

  double cost_of(FormatTag t) const { return cost[static_cast<int>(t)]; }
};

/// R = w1 * min(-log10(max(rho', eps_min)), -log10(eps_min))
///     - w2 * sum_j cost(p_j) + w3 * [rho' < tol]
double reward(double rho_next, const PrecisionAction& action,
              const RewardConfig& rcfg);

struct TrainConfig {
  int episodes = 200;  // per training matrix
  double learning_rate = 0.1;
  double discount = 0.9;
  double eps0 = 1.0;
  double eps_floor = 0.1;
  std::uint64_t seed = 0;
  bool shuffle_interleave = false;
};

/// Exploration rate after `episode` episodes out of tcfg.episodes:
/// max(eps0 * (1 - e/E), eps_floor).
double epsilon_schedule(int episode, const TrainConfig& tcfg);

/// Four Q-tables (one per controlled operation), each state x format.
struct QPolicy {
  MdpConfig mdp;
  std::vector<FormatTag> precision_set;
  std::array<std::vector<double>, kNumOps> tables;
  std::int64_t trained_episodes = 0;

  QPolicy() = default;
  QPolicy(const MdpConfig& m, std::vector<FormatTag> precisions);

  double& q(int op, int state, int p) {
    return tables[op][static_cast<std::size_t>(state) * precision_set.size() +
                      p];
  }
  double q(int op, int state, int p) const {
    return tables[op][static_cast<std::size_t>(state) * precision_set.size() +
                      p];
  }
  bool operator==(const QPolicy&) const = default;
};

/// Greedy argmax over one Q-row; ties broken by lowest cost, then lowest
/// precision-set index, so an untrained table degrades to the cheapest
/// format.
int greedy_index(const QPolicy& q, int op, int state,
                 const std::array<double, 6>& cost);

PrecisionAction greedy_action(const QPolicy& q, int state,
                              const std::array<double, 6>& cost);

/// Epsilon-greedy selection, independently per operation: with
/// probability epsilon a uniform random member of the precision set,
/// otherwise the greedy choice.
PrecisionAction select_action(const QPolicy& q, int state, double epsilon,
                              const std::array<double, 6>& cost, Rng& rng);

/// One Q-learning update per operation:
///   Q_j(s, p_j) += alpha * (R + gamma * max_p Q_j(s', p) - Q_j(s, p_j)),
/// with the discounted term omitted when s_next is absent (terminal).
void q_update(QPolicy& q, int state, const PrecisionAction& action, double r,
              std::optional<int> state_next, double alpha, double gamma);

/// Wraps a trained policy (plus the cost table used for tie-breaking)
/// as a solver policy for cg_solve.
PrecisionPolicy greedy_policy(const QPolicy& q,
                              const std::array<double, 6>& cost);

/// One training problem: system, right-hand side, preconditioner.
struct TrainProblem {
  const CsrMatrix* a;
  const DenseVector* b;
  const IlutFactors* m;
};

struct EpisodeLog {
  int episode;
  int problem;
  double epsilon;
  int iterations;
  double final_rho;
  SolveStatus status;
  double cumulative_reward;
};

/// Q-learning over the CG environment. Problems are visited in order,
/// tcfg.episodes each; epsilon decays over the global episode counter.
/// Episodes end on convergence (terminal update), breakdown (terminal
/// update with the reward at the last finite residual), or max_iters.
QPolicy train(const std::vector<TrainProblem>& problems, const MdpConfig& mdp,
              const RewardConfig& rcfg, const TrainConfig& tcfg,
              const CgConfig& cg, std::vector<EpisodeLog>* log = nullptr);

/// Versioned JSON persistence. Round-trips are lossless: load(save(q))
/// compares equal including every Q-value bit. Throws
/// FormatVersionMismatch on version/shape conflicts and CorruptFile on
/// checksum failure.
void save_policy(const QPolicy& q, const std::string& path);
QPolicy load_policy(const std::string& path);

}  // namespace mpcg
