#include "mpcg/problems.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "mpcg/errors.hpp"
#include "mpcg/matrix_market.hpp"
#include "mpcg/rng.hpp"
#include "mpcg/sparse_kernels.hpp"

namespace mpcg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GeneratedSystem gen_sparse_spd(const SparseRandomSpec& spec,
                               SparseRandomRealization* realized) {
  if (spec.n < 1 || spec.n_pairs < 0)
    throw std::invalid_argument("sparse spec: bad dimensions");
  Rng rng(spec.seed);
  const double scale = rng.uniform(spec.sparsity_scale_range.first,
                                   spec.sparsity_scale_range.second);
  const int pairs = static_cast<int>(std::lround(scale * spec.n_pairs));
  const double beta =
      rng.uniform(spec.beta_range.first, spec.beta_range.second);

  // B as column buckets: col -> accumulated (row, value) entries.
  std::vector<std::vector<std::pair<int, double>>> cols(spec.n);
  for (int k = 0; k < pairs; ++k) {
    const int i = static_cast<int>(rng.uniform_index(spec.n));
    const int j = static_cast<int>(rng.uniform_index(spec.n));
    const double v = rng.normal();
    auto& bucket = cols[j];
    bool merged = false;
    for (auto& [r, val] : bucket)
      if (r == i) {
        val += v;
        merged = true;
        break;
      }
    if (!merged) bucket.emplace_back(i, v);
  }

  // A = B B' + beta I, accumulated over per-column outer products.
  std::unordered_map<std::int64_t, double> acc;
  acc.reserve(static_cast<std::size_t>(pairs) * 4 + spec.n);
  for (const auto& bucket : cols)
    for (const auto& [ri, vi] : bucket)
      for (const auto& [rj, vj] : bucket) {
        if (rj < ri) continue;  // accumulate upper triangle only
        acc[(static_cast<std::int64_t>(ri) << 32) | rj] += vi * vj;
      }

  std::vector<Triplet> trips;
  trips.reserve(acc.size() * 2 + spec.n);
  for (const auto& [key, v] : acc) {
    const int i = static_cast<int>(key >> 32);
    const int j = static_cast<int>(key & 0xffffffff);
    trips.push_back({i, j, v});
    if (i != j) trips.push_back({j, i, v});
  }
  for (int i = 0; i < spec.n; ++i) trips.push_back({i, i, beta});

  GeneratedSystem sys;
  sys.a = csr_from_triplets(spec.n, std::move(trips));
  sys.b.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) sys.b[i] = rng.normal();
  if (realized) *realized = {beta, scale, pairs};
  return sys;
}

double BcSpec::eval(double s) const {
  switch (kind) {
    case BcKind::Constant: return a;
    case BcKind::Linear: return a + b * s;
    case BcKind::Sinusoidal: return a * std::sin(b * s);
  }
  return 0.0;
}

double SourceSpec::eval(double x, double y) const {
  switch (kind) {
    case SourceKind::Zero: return 0.0;
    case SourceKind::Sinusoidal: return c[0] * std::sin(c[1] * x) * std::sin(c[2] * y);
    case SourceKind::Polynomial:
      return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y +
             c[5] * y * y;
  }
  return 0.0;
}

PoissonSpec PoissonSpec::sample(int nx, int ny, std::uint64_t seed) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("poisson spec: bad grid");
  PoissonSpec s;
  s.nx = nx;
  s.ny = ny;
  s.seed = seed;
  Rng rng(seed);
  s.ax = rng.uniform(0.0, 1.9);
  s.bx = s.ax + rng.uniform(0.1, 2.0 - s.ax);
  s.ay = rng.uniform(0.0, 1.9);
  s.by = s.ay + rng.uniform(0.1, 2.0 - s.ay);
  for (BcSpec& bc : s.bc) {
    switch (rng.uniform_index(3)) {
      case 0:
        bc.kind = BcKind::Constant;
        bc.a = rng.uniform(-1.0, 1.0);
        break;
      case 1:
        bc.kind = BcKind::Linear;
        bc.a = rng.uniform(-1.0, 1.0);
        bc.b = rng.uniform(-1.0, 1.0);
        break;
      default:
        bc.kind = BcKind::Sinusoidal;
        bc.a = rng.uniform(-1.0, 1.0);
        bc.b = rng.uniform(0.5, 3.0) * kPi;
        break;
    }
  }
  switch (rng.uniform_index(3)) {
    case 0:
      s.source.kind = SourceKind::Zero;
      break;
    case 1:
      s.source.kind = SourceKind::Sinusoidal;
      s.source.c[0] = rng.uniform(-1.0, 1.0);
      s.source.c[1] = rng.uniform(0.5, 3.0) * kPi;
      s.source.c[2] = rng.uniform(0.5, 3.0) * kPi;
      break;
    default:
      s.source.kind = SourceKind::Polynomial;
      for (int i = 0; i < 6; ++i) s.source.c[i] = rng.uniform(-1.0, 1.0);
      break;
  }
  return s;
}

GeneratedSystem gen_poisson2d(const PoissonSpec& spec) {
  const int nx = spec.nx, ny = spec.ny;
  if (nx < 1 || ny < 1) throw std::invalid_argument("poisson: bad grid");
  const double hx = spec.hx(), hy = spec.hy();
  if (!(hx > 0.0 && hy > 0.0))
    throw std::invalid_argument("poisson: degenerate subdomain");
  const double cx = 1.0 / (hx * hx);
  const double cy = 1.0 / (hy * hy);
  const double diag = 2.0 * cx + 2.0 * cy;
  const int n = nx * ny;
  const auto idx = [nx](int i, int j) { return j * nx + i; };

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(5) * n);
  GeneratedSystem sys;
  sys.b.assign(n, 0.0);

  const BcSpec& left = spec.bc[0];
  const BcSpec& right = spec.bc[1];
  const BcSpec& bottom = spec.bc[2];
  const BcSpec& top = spec.bc[3];

  for (int j = 0; j < ny; ++j) {
    const double y = spec.ay + (j + 1) * hy;
    for (int i = 0; i < nx; ++i) {
      const double x = spec.ax + (i + 1) * hx;
      const int row = idx(i, j);
      trips.push_back({row, row, diag});
      sys.b[row] += spec.source.eval(x, y);
      if (i > 0)
        trips.push_back({row, idx(i - 1, j), -cx});
      else
        sys.b[row] += left.eval(y) * cx;
      if (i < nx - 1)
        trips.push_back({row, idx(i + 1, j), -cx});
      else
        sys.b[row] += right.eval(y) * cx;
      if (j > 0)
        trips.push_back({row, idx(i, j - 1), -cy});
      else
        sys.b[row] += bottom.eval(x) * cy;
      if (j < ny - 1)
        trips.push_back({row, idx(i, j + 1), -cy});
      else
        sys.b[row] += top.eval(x) * cy;
    }
  }
  sys.a = csr_from_triplets(n, std::move(trips));
  return sys;
}

const char* to_string(ProblemFamily f) {
  return f == ProblemFamily::SparseRandom ? "sparse_random" : "poisson2d";
}

ProblemFamily parse_family(const std::string& name) {
  if (name == "sparse_random" || name == "sparse")
    return ProblemFamily::SparseRandom;
  if (name == "poisson2d" || name == "poisson") return ProblemFamily::Poisson2d;
  throw std::invalid_argument("unknown problem family: " + name);
}

namespace {

nlohmann::json bc_json(const BcSpec& bc) {
  switch (bc.kind) {
    case BcKind::Constant: return {{"kind", "constant"}, {"value", bc.a}};
    case BcKind::Linear:
      return {{"kind", "linear"}, {"intercept", bc.a}, {"slope", bc.b}};
    case BcKind::Sinusoidal:
      return {{"kind", "sinusoidal"}, {"amplitude", bc.a}, {"frequency", bc.b}};
  }
  return {};
}

nlohmann::json source_json(const SourceSpec& src) {
  switch (src.kind) {
    case SourceKind::Zero: return {{"kind", "zero"}};
    case SourceKind::Sinusoidal:
      return {{"kind", "sinusoidal"},
              {"amplitude", src.c[0]},
              {"freq_x", src.c[1]},
              {"freq_y", src.c[2]}};
    case SourceKind::Polynomial:
      return {{"kind", "polynomial"},
              {"coeffs", std::vector<double>(src.c.begin(), src.c.end())}};
  }
  return {};
}

}  // namespace

std::vector<ProblemInstance> make_problem_set(const ProblemSetOptions& opts,
                                              int count,
                                              std::uint64_t base_seed,
                                              int* skipped) {
  if (count < 1) throw std::invalid_argument("make_problem_set: count < 1");
  std::vector<ProblemInstance> out;
  out.reserve(count);
  if (skipped) *skipped = 0;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    ProblemInstance inst;
    inst.id = i;
    inst.seed = seed;
    nlohmann::json params;
    try {
      if (opts.family == ProblemFamily::SparseRandom) {
        SparseRandomSpec spec = opts.sparse;
        spec.seed = seed;
        SparseRandomRealization real{};
        GeneratedSystem sys = gen_sparse_spd(spec, &real);
        inst.a = std::move(sys.a);
        inst.b = std::move(sys.b);
        params = {{"family", "sparse_random"}, {"n", spec.n},
                  {"n_pairs", spec.n_pairs}, {"beta", real.beta},
                  {"scale", real.scale},     {"pairs_sampled", real.pairs}};
      } else {
        const PoissonSpec spec = PoissonSpec::sample(opts.nx, opts.ny, seed);
        GeneratedSystem sys = gen_poisson2d(spec);
        inst.a = std::move(sys.a);
        inst.b = std::move(sys.b);
        params = {{"family", "poisson2d"},
                  {"nx", spec.nx},
                  {"ny", spec.ny},
                  {"subdomain", {spec.ax, spec.bx, spec.ay, spec.by}},
                  {"bc", {bc_json(spec.bc[0]), bc_json(spec.bc[1]),
                          bc_json(spec.bc[2]), bc_json(spec.bc[3])}},
                  {"source", source_json(spec.source)}};
      }
      inst.x_true = direct_solve(inst.a, inst.b);
      inst.m = ilut_or_jacobi(inst.a, opts.ilut_drop_tol, opts.ilut_fill,
                              opts.ilut_fmt);
      params["seed"] = seed;
      params["ilut"] = {{"drop_tol", opts.ilut_drop_tol},
                        {"fill_factor", opts.ilut_fill},
                        {"storage", to_string(opts.ilut_fmt)},
                        {"jacobi_fallback", inst.m.from_jacobi_fallback}};
      params["rhs"] = opts.family == ProblemFamily::SparseRandom
                          ? "iid standard normal"
                          : "source plus boundary contributions";
      params["x_true"] = "direct solve";
      inst.params_json = params.dump();
    } catch (const SingularMatrix&) {
      if (skipped) ++(*skipped);
      continue;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace mpcg
