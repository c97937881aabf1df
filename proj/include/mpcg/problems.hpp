#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpcg/csr.hpp"
#include "mpcg/ilut.hpp"

namespace mpcg {

/// Synthetic sparse SPD family: A = B B' + beta I where B collects
/// round(scale * n_pairs) standard-normal entries at uniformly sampled
/// index pairs (duplicates accumulate), beta ~ U(beta_range) and
/// scale ~ U(sparsity_scale_range). The right-hand side has i.i.d.
/// standard normal entries.
struct SparseRandomSpec {
  int n = 500;
  int n_pairs = 500;
  std::pair<double, double> beta_range{1e-4, 1e-2};
  std::pair<double, double> sparsity_scale_range{0.8, 1.2};
  std::uint64_t seed = 0;
};

struct SparseRandomRealization {
  double beta;
  double scale;
  int pairs;
};

struct GeneratedSystem {
  CsrMatrix a;
  DenseVector b;
};

GeneratedSystem gen_sparse_spd(const SparseRandomSpec& spec,
                               SparseRandomRealization* realized = nullptr);

/// 2D Poisson family on a random axis-aligned subdomain of [0,2]^2,
/// five-point stencil over nx x ny interior points, Dirichlet data and
/// source terms sampled per edge / per instance.
enum class BcKind { Constant, Linear, Sinusoidal };
enum class SourceKind { Zero, Sinusoidal, Polynomial };

struct BcSpec {
  BcKind kind = BcKind::Constant;
  double a = 0.0;  // constant value / linear intercept / amplitude
  double b = 0.0;  // linear slope / angular frequency
  double eval(double s) const;
};

struct SourceSpec {
  SourceKind kind = SourceKind::Zero;
  std::array<double, 6> c{};  // amplitude+frequencies or poly coefficients
  double eval(double x, double y) const;
};

struct PoissonSpec {
  int nx = 40;
  int ny = 40;
  std::uint64_t seed = 0;
  // Realized subdomain [ax, bx] x [ay, by] and sampled data functions;
  // edges ordered left, right, bottom, top.
  double ax = 0.0, bx = 2.0, ay = 0.0, by = 2.0;
  std::array<BcSpec, 4> bc{};
  SourceSpec source{};

  double hx() const { return (bx - ax) / (nx + 1); }
  double hy() const { return (by - ay) / (ny + 1); }

  /// Samples subdomain, boundary conditions and source for a seed.
  static PoissonSpec sample(int nx, int ny, std::uint64_t seed);
};

/// Assembles the five-point system for a fully realized spec. Unknowns
/// are ordered row-major with y as the outer index.
GeneratedSystem gen_poisson2d(const PoissonSpec& spec);

enum class ProblemFamily { SparseRandom, Poisson2d };

const char* to_string(ProblemFamily f);
ProblemFamily parse_family(const std::string& name);

/// A complete benchmark instance: system, reference solution from the
/// direct solver, and the fp32 ILUT preconditioner (Jacobi on pivot
/// failure).
struct ProblemInstance {
  int id = 0;
  std::uint64_t seed = 0;
  CsrMatrix a;
  DenseVector b;
  DenseVector x_true;
  IlutFactors m;
  std::string params_json;  // realized generator parameters
};

struct ProblemSetOptions {
  ProblemFamily family = ProblemFamily::Poisson2d;
  SparseRandomSpec sparse;  // seed overridden per instance
  int nx = 40;
  int ny = 40;
  double ilut_drop_tol = 1e-4;
  double ilut_fill = 10.0;
  FormatTag ilut_fmt = FormatTag::fp32;
};

/// Test sets use base_seed + kTestSeedOffset so train/test instances
/// never share a generator seed.
inline constexpr std::uint64_t kTestSeedOffset = 1u << 20;

/// Generates `count` independent instances with seeds base_seed + i.
/// Instances whose direct solve fails are skipped (and counted in
/// *skipped if given).
std::vector<ProblemInstance> make_problem_set(const ProblemSetOptions& opts,
                                              int count,
                                              std::uint64_t base_seed,
                                              int* skipped = nullptr);

}  // namespace mpcg
