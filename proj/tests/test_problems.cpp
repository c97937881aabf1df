#include <cmath>

#include "doctest.h"
#include "mpcg/problems.hpp"
#include "mpcg/rng.hpp"
#include "mpcg/sparse_kernels.hpp"
#include "oracles.hpp"

using namespace mpcg;

TEST_CASE("empty B degenerates to beta * I") {
  SparseRandomSpec spec;
  spec.n = 3;
  spec.n_pairs = 0;
  spec.beta_range = {0.75, 0.75};
  spec.seed = 1;
  GeneratedSystem sys = gen_sparse_spd(spec);
  CHECK(sys.a.nnz() == 3);
  for (int i = 0; i < 3; ++i) CHECK(sys.a.at(i, i) == 0.75);
}

TEST_CASE("generated sparse matrices are SPD by construction") {
  Rng outer(501);
  for (int trial = 0; trial < 5; ++trial) {
    SparseRandomSpec spec;
    spec.n = 40;
    spec.n_pairs = 60;
    spec.seed = outer.next_u64();
    GeneratedSystem sys = gen_sparse_spd(spec);
    sys.a.validate();
    CHECK(is_symmetric(sys.a));
    for (int i = 0; i < spec.n; ++i) CHECK(sys.a.at(i, i) > 0.0);
    Rng rng(outer.next_u64());
    for (int probe = 0; probe < 100; ++probe) {
      const DenseVector x = oracles::random_vector(rng, spec.n);
      CHECK(dot_fp64(x, oracles::matvec_plain(sys.a, x)) > 0.0);
    }
  }
}

TEST_CASE("smallest eigenvalue is bounded below by beta") {
  SparseRandomSpec spec;
  spec.n = 5;
  spec.n_pairs = 6;
  spec.beta_range = {0.01, 0.01};
  spec.seed = 77;
  GeneratedSystem sys = gen_sparse_spd(spec);
  const double lam = oracles::smallest_eigenvalue(sys.a);
  CHECK(lam >= 0.01 - 1e-10);
}

TEST_CASE("scale range controls the sampled pair count") {
  SparseRandomSpec spec;
  spec.n = 100;
  spec.n_pairs = 50;
  spec.sparsity_scale_range = {2.0, 2.0};
  spec.seed = 3;
  SparseRandomRealization real{};
  gen_sparse_spd(spec, &real);
  CHECK(real.pairs == 100);
  CHECK(real.scale == 2.0);
}

TEST_CASE("poisson 1x1 on the full domain gives the scalar stencil") {
  PoissonSpec spec;
  spec.nx = spec.ny = 1;
  spec.ax = spec.ay = 0.0;
  spec.bx = spec.by = 2.0;  // h = 1
  spec.bc = {};             // zero constants
  spec.source = {};
  GeneratedSystem sys = gen_poisson2d(spec);
  CHECK(sys.a.nnz() == 1);
  CHECK(sys.a.at(0, 0) == 4.0);
  CHECK(sys.b == DenseVector{0.0});
}

TEST_CASE("poisson with unit spacings matches the Kronecker oracle") {
  PoissonSpec spec;
  spec.nx = spec.ny = 2;
  spec.ax = spec.ay = 0.0;
  spec.bx = spec.by = 3.0;  // h = 1 for a 2x2 interior
  spec.bc = {};
  spec.source = {};
  GeneratedSystem sys = gen_poisson2d(spec);
  const CsrMatrix want = oracles::kronecker_poisson(2, 2);
  REQUIRE(sys.a.nnz() == want.nnz());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(sys.a.at(i, j) == want.at(i, j));

  // larger grid, still exact values
  PoissonSpec big;
  big.nx = 4;
  big.ny = 3;
  big.ax = big.ay = 0.0;
  big.bx = 5.0;
  big.by = 4.0;
  big.bc = {};
  big.source = {};
  GeneratedSystem sysb = gen_poisson2d(big);
  const CsrMatrix wantb = oracles::kronecker_poisson(4, 3);
  REQUIRE(sysb.a.nnz() == wantb.nnz());
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) CHECK(sysb.a.at(i, j) == wantb.at(i, j));
}

TEST_CASE("constant boundary data reproduces the constant solution") {
  PoissonSpec spec = PoissonSpec::sample(6, 5, 11);
  for (BcSpec& bc : spec.bc) bc = {BcKind::Constant, 0.8125, 0.0};
  spec.source = {};
  GeneratedSystem sys = gen_poisson2d(spec);
  const DenseVector x = direct_solve(sys.a, sys.b);
  for (double v : x) CHECK(v == doctest::Approx(0.8125).epsilon(1e-10));
}

TEST_CASE("poisson rows are weakly diagonally dominant") {
  const PoissonSpec spec = PoissonSpec::sample(7, 9, 21);
  GeneratedSystem sys = gen_poisson2d(spec);
  const int n = sys.a.n;
  for (int i = 0; i < n; ++i) {
    double diag = 0.0, off = 0.0;
    int neighbors = 0;
    for (std::int64_t k = sys.a.row_ptr[i]; k < sys.a.row_ptr[i + 1]; ++k) {
      if (sys.a.col_idx[k] == i) {
        diag = sys.a.values[k];
      } else {
        off += std::fabs(sys.a.values[k]);
        ++neighbors;
      }
    }
    CHECK(diag >= off - 1e-12 * diag);
    if (neighbors == 4)  // interior-only rows: weak dominance is equality
      CHECK(diag == doctest::Approx(off).epsilon(1e-12));
    else
      CHECK(diag > off);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  SparseRandomSpec spec;
  spec.n = 30;
  spec.n_pairs = 45;
  spec.seed = 909;
  GeneratedSystem a = gen_sparse_spd(spec);
  GeneratedSystem b = gen_sparse_spd(spec);
  CHECK(a.a.values == b.a.values);
  CHECK(a.a.col_idx == b.a.col_idx);
  CHECK(a.b == b.b);

  const PoissonSpec p1 = PoissonSpec::sample(5, 5, 404);
  const PoissonSpec p2 = PoissonSpec::sample(5, 5, 404);
  CHECK(p1.ax == p2.ax);
  CHECK(p1.source.kind == p2.source.kind);
  GeneratedSystem g1 = gen_poisson2d(p1);
  GeneratedSystem g2 = gen_poisson2d(p2);
  CHECK(g1.a.values == g2.a.values);
  CHECK(g1.b == g2.b);
}

TEST_CASE("sampled subdomains stay inside the outer box") {
  Rng rng(911);
  for (int i = 0; i < 200; ++i) {
    const PoissonSpec s = PoissonSpec::sample(3, 3, rng.next_u64());
    CHECK(s.ax >= 0.0);
    CHECK(s.ax < s.bx);
    CHECK(s.bx <= 2.0 + 1e-12);
    CHECK(s.ay >= 0.0);
    CHECK(s.ay < s.by);
    CHECK(s.by <= 2.0 + 1e-12);
    CHECK(s.hx() > 0.0);
    CHECK(s.hy() > 0.0);
  }
}

TEST_CASE("make_problem_set builds complete, reproducible instances") {
  ProblemSetOptions opts;
  opts.family = ProblemFamily::Poisson2d;
  opts.nx = opts.ny = 6;
  const auto set = make_problem_set(opts, 3, 1234);
  REQUIRE(set.size() == 3);
  for (const ProblemInstance& inst : set) {
    const DenseVector ax = oracles::matvec_plain(inst.a, inst.x_true);
    DenseVector r(ax.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = inst.b[i] - ax[i];
    CHECK(norm2_fp64(r) / norm2_fp64(inst.b) <= 1e-10);
    CHECK_FALSE(inst.params_json.empty());
    CHECK(inst.m.upper.n == inst.a.n);
  }
  const auto again = make_problem_set(opts, 3, 1234);
  for (int i = 0; i < 3; ++i) {
    CHECK(set[i].a.values == again[i].a.values);
    CHECK(set[i].b == again[i].b);
    CHECK(set[i].x_true == again[i].x_true);
    CHECK(set[i].params_json == again[i].params_json);
  }
}

TEST_CASE("train and test seed ranges are disjoint") {
  ProblemSetOptions opts;
  opts.family = ProblemFamily::SparseRandom;
  opts.sparse.n = 10;
  opts.sparse.n_pairs = 12;
  const std::uint64_t base = 7;
  const auto train_set = make_problem_set(opts, 10, base);
  const auto test_set = make_problem_set(opts, 100, base + kTestSeedOffset);
  for (const auto& tr : train_set)
    for (const auto& te : test_set) CHECK(tr.seed != te.seed);
}
