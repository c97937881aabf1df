#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mpcg/csr.hpp"
#include "mpcg/ilut.hpp"
#include "mpcg/precision.hpp"

namespace mpcg {

/// Per-iteration precision assignment for the four controlled
/// operations: matrix-vector product, preconditioner solve, and the two
/// inner products (p'q feeding the step size, r'z feeding the direction
/// coefficient).
struct PrecisionAction {
  FormatTag matvec = FormatTag::fp64;
  FormatTag precond = FormatTag::fp64;
  FormatTag dot_pq = FormatTag::fp64;
  FormatTag dot_rz = FormatTag::fp64;

  FormatTag operator[](int op) const {
    switch (op) {
      case 0: return matvec;
      case 1: return precond;
      case 2: return dot_pq;
      default: return dot_rz;
    }
  }
  FormatTag& operator[](int op) {
    switch (op) {
      case 0: return matvec;
      case 1: return precond;
      case 2: return dot_pq;
      default: return dot_rz;
    }
  }
  bool operator==(const PrecisionAction&) const = default;
};

inline constexpr int kNumOps = 4;

struct CgConfig {
  double tol = 1e-6;
  int max_iters = 1000;
  int min_iters = 10;
  EmulationMode emulation_mode = EmulationMode::Strict;
  std::vector<FormatTag> precision_set = {FormatTag::bf16, FormatTag::fp16,
                                          FormatTag::tf32, FormatTag::fp32,
                                          FormatTag::fp64};
};

struct IterationRecord {
  int k;
  double rho;  // ||r_k|| / ||b|| entering iteration k
  PrecisionAction action;
  double alpha;
  double beta;  // NaN when the iteration ended before beta was computed
};

enum class SolveStatus { Converged, MaxIters, Breakdown };

const char* to_string(SolveStatus s);

struct SolveResult {
  DenseVector x;
  SolveStatus status = SolveStatus::MaxIters;
  int iterations = 0;
  double final_rho = 1.0;
  std::vector<IterationRecord> trace;
};

/// One preconditioned CG iteration at a time, with per-step precision
/// control. Scalars, the solution/residual/direction updates and the
/// convergence test all run in fp64; only the four operations named in
/// PrecisionAction are emulated.
///
/// The initial preconditioned residual z_0 is computed lazily inside the
/// first step() so that its precision comes from the policy's action at
/// (k = 0, rho = 1).
class CgStepper {
 public:
  struct Step {
    double rho_next;
    double alpha;
    double beta;
    bool converged;
    bool breakdown;
  };

  CgStepper(const CsrMatrix& a, const DenseVector& b, const IlutFactors& m,
            const CgConfig& cfg);

  Step step(const PrecisionAction& action);

  int k() const { return k_; }
  double rho() const { return rho_; }
  const DenseVector& x() const { return x_; }
  const DenseVector& residual() const { return r_; }
  const DenseVector& best_x() const { return best_x_; }
  double best_rho() const { return best_rho_; }

 private:
  const CsrMatrix& a_;
  const IlutFactors& m_;
  const CgConfig& cfg_;
  double b_norm_;
  DenseVector x_, r_, z_, p_;
  DenseVector best_x_;
  double best_rho_;
  double sigma_ = 0.0;
  double rho_ = 1.0;
  int k_ = 0;
  bool started_ = false;
};

/// Maps (iteration, residual ratio) to a PrecisionAction.
using PrecisionPolicy = std::function<PrecisionAction(int k, double rho)>;

/// Constant policy emitting the same format for all four operations.
PrecisionPolicy fixed_policy(FormatTag fmt);

/// Full preconditioned CG solve driven by a policy. Converges when
/// rho < cfg.tol with at least cfg.min_iters iterations done; on
/// breakdown (nonpositive or zero curvature, vanished sigma, or
/// non-finite scalars/residual) the lowest-residual iterate seen so far
/// is returned. Deterministic: identical inputs give bit-identical
/// results.
SolveResult cg_solve(const CsrMatrix& a, const DenseVector& b,
                     const IlutFactors& m, const PrecisionPolicy& policy,
                     const CgConfig& cfg);

/// Writes a trace as CSV with columns k,rho,p1,p2,p3,p4,alpha,beta.
void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace);

}  // namespace mpcg
