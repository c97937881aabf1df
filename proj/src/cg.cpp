#include "mpcg/cg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mpcg/errors.hpp"
#include "mpcg/kernels.hpp"
#include "mpcg/matrix_market.hpp"
#include "mpcg/sparse_kernels.hpp"

namespace mpcg {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Breakdown: return "breakdown";
  }
  return "?";
}

CgStepper::CgStepper(const CsrMatrix& a, const DenseVector& b,
                     const IlutFactors& m, const CgConfig& cfg)
    : a_(a), m_(m), cfg_(cfg) {
  if (a.n != static_cast<int>(b.size()))
    throw std::invalid_argument("cg: dimension mismatch");
  b_norm_ = norm2_fp64(b);
  if (b_norm_ <= 0.0) throw std::invalid_argument("cg: ||b|| must be positive");
  x_.assign(a.n, 0.0);
  r_ = b;
  best_x_ = x_;
  best_rho_ = rho_ = 1.0;
}

CgStepper::Step CgStepper::step(const PrecisionAction& action) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  Step out{rho_, kNan, kNan, false, false};
  const EmulationMode mode = cfg_.emulation_mode;

  if (!started_) {
    z_ = apply_precond(m_, r_, format_of(action.precond), mode);
    p_ = z_;
    sigma_ = dot_fp64(r_, z_);
    started_ = true;
  }

  const DenseVector q = matvec_emulated(a_, p_, format_of(action.matvec), mode);
  const double nu = dot_emulated(p_, q, format_of(action.dot_pq), mode);
  if (!std::isfinite(nu) || nu <= 0.0 || !std::isfinite(sigma_) ||
      sigma_ == 0.0) {
    out.breakdown = true;
    return out;
  }
  const double alpha = sigma_ / nu;
  out.alpha = alpha;
  kernels::axpy(alpha, p_.data(), x_.data(), x_.size());
  kernels::axpy(-alpha, q.data(), r_.data(), r_.size());
  const double rho_next = norm2_fp64(r_) / b_norm_;
  out.rho_next = rho_next;
  if (!std::isfinite(rho_next)) {
    out.breakdown = true;
    ++k_;
    return out;
  }
  rho_ = rho_next;
  if (rho_next < best_rho_) {
    best_rho_ = rho_next;
    best_x_ = x_;
  }
  if (rho_next < cfg_.tol && k_ + 1 >= cfg_.min_iters) {
    out.converged = true;
    ++k_;
    return out;
  }
  z_ = apply_precond(m_, r_, format_of(action.precond), mode);
  const double sigma_next =
      dot_emulated(r_, z_, format_of(action.dot_rz), mode);
  if (!std::isfinite(sigma_next)) {
    out.breakdown = true;
    ++k_;
    return out;
  }
  const double beta = sigma_next / sigma_;
  out.beta = beta;
  kernels::xpay(z_.data(), beta, p_.data(), p_.size());
  sigma_ = sigma_next;
  ++k_;
  return out;
}

PrecisionPolicy fixed_policy(FormatTag fmt) {
  return [fmt](int, double) {
    return PrecisionAction{fmt, fmt, fmt, fmt};
  };
}

SolveResult cg_solve(const CsrMatrix& a, const DenseVector& b,
                     const IlutFactors& m, const PrecisionPolicy& policy,
                     const CgConfig& cfg) {
  CgStepper stepper(a, b, m, cfg);
  SolveResult res;
  res.trace.reserve(std::min(cfg.max_iters, 1024));
  for (int k = 0; k < cfg.max_iters; ++k) {
    const double rho_k = stepper.rho();
    const PrecisionAction action = policy(k, rho_k);
    const CgStepper::Step s = stepper.step(action);
    res.trace.push_back({k, rho_k, action, s.alpha, s.beta});
    if (s.breakdown) {
      res.status = SolveStatus::Breakdown;
      res.x = stepper.best_x();
      res.iterations = static_cast<int>(res.trace.size());
      res.final_rho = stepper.rho();
      return res;
    }
    if (s.converged) {
      res.status = SolveStatus::Converged;
      res.x = stepper.x();
      res.iterations = static_cast<int>(res.trace.size());
      res.final_rho = s.rho_next;
      return res;
    }
  }
  res.status = SolveStatus::MaxIters;
  res.x = stepper.x();
  res.iterations = cfg.max_iters;
  res.final_rho = stepper.rho();
  return res;
}

void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "k,rho,p1,p2,p3,p4,alpha,beta\n";
  for (const IterationRecord& rec : trace) {
    out << rec.k << "," << format_double(rec.rho) << ","
        << to_string(rec.action.matvec) << "," << to_string(rec.action.precond)
        << "," << to_string(rec.action.dot_pq) << ","
        << to_string(rec.action.dot_rz) << "," << format_double(rec.alpha)
        << "," << format_double(rec.beta) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mpcg
