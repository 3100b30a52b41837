#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sparsecs/experiments/oracle.hpp"
#include "sparsecs/heuristics/heuristics.hpp"
#include "sparsecs/relaxations/relaxations.hpp"
#include "support/test_util.hpp"

using namespace sparsecs;
using sparsecs::testutil::code_of;
using sparsecs::testutil::gaussian_matrix;
using sparsecs::testutil::gaussian_vector;
using sparsecs::testutil::random_instance;

TEST(Omp, IdentityExample) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{3.0, 0.0}}, 0.5);
  const auto x = omp(inst);
  EXPECT_EQ(x.support(), IndexSet{0});
  EXPECT_LE((x.x - Vector{{3.0, 0.0}}).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Omp, ZeroWhenBudgetCoversB) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{0.3, 0.4}}, 0.25);
  EXPECT_EQ(omp(inst).sparsity(), 0u);
}

TEST(Omp, NoCompletion) {
  auto inst = ProblemInstance::make(Matrix{{1.0}, {0.0}}, Vector{{0.0, 2.0}}, 1.0);
  EXPECT_EQ(code_of([&] { omp(inst); }), ErrorCode::NoFeasibleCompletion);
}

TEST(Omp, OrthogonalDesignPicksLargestCorrelationsFirst) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 12;
    const Index n = 8;
    const Matrix Q = gaussian_matrix(rng, m, m).householderQr().householderQ();
    // Orthogonal columns with different norms.
    Matrix A = Q.leftCols(n) * gaussian_vector(rng, n).cwiseAbs().asDiagonal();
    const Vector b = gaussian_vector(rng, m);
    const double ls = projection_residual_sq(A, b);
    auto inst = ProblemInstance::make(A, b, ls + 0.3 * (b.squaredNorm() - ls));

    // Projection onto orthogonal columns removes (q_i'b)^2 each; OMP ranks by |a_i'b|
    // which is |q_i'b| times the column norm.
    std::vector<Index> by_corr(static_cast<std::size_t>(n));
    std::iota(by_corr.begin(), by_corr.end(), Index{0});
    const Vector corr = A.transpose() * b;
    std::stable_sort(by_corr.begin(), by_corr.end(),
                     [&](Index i, Index j) { return std::abs(corr(i)) > std::abs(corr(j)); });
    // OMP re-scores against the residual, which for orthogonal columns leaves
    // the unselected correlations unchanged; so the order is fixed up front.
    double res = b.squaredNorm();
    IndexSet expected;
    for (Index i : by_corr) {
      if (res <= inst.epsilon) break;
      const double qb = Q.col(i).dot(b);
      res -= qb * qb;
      expected.push_back(i);
    }
    const auto trace = omp_trace(inst);
    EXPECT_EQ(trace.order, expected);
  }
}

TEST(Omp, ResidualStrictlyDecreasesWithIndependentColumns) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_instance(rng, 15, 10, 0.1);
    const auto trace = omp_trace(inst);
    ASSERT_EQ(trace.residual_sq.size(), trace.order.size() + 1);
    for (std::size_t t = 1; t < trace.residual_sq.size(); ++t) {
      EXPECT_LT(trace.residual_sq[t], trace.residual_sq[t - 1]);
    }
    EXPECT_LE(trace.residual_sq.back(), inst.epsilon);
  }
}

TEST(Irwl1, SparseVertexConvergesImmediately) {
  // BPD solution (2, 0, 0) is exactly sparse; reweighting keeps it.
  auto inst = ProblemInstance::make(Matrix::Identity(3, 3), Vector{{3.0, 0.0, 0.0}}, 1.0);
  const auto res = irwl1(inst);
  EXPECT_LE(res.iterations, 2);
  EXPECT_EQ(res.x.support(), IndexSet{0});
  EXPECT_NEAR(res.x.x(0), 2.0, 1e-6);
}

TEST(Irwl1, ZeroWhenBudgetCoversB) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{0.3, 0.4}}, 0.25);
  const auto res = irwl1(inst);
  EXPECT_EQ(res.x.sparsity(), 0u);
}

TEST(Irwl1, WeightsStayPositiveAndFinite) {
  std::mt19937_64 rng(13);
  auto inst = random_instance(rng, 8, 16, 0.3);
  Irwl1Settings settings;
  settings.max_iters = 5;
  const auto res = irwl1(inst, settings);
  EXPECT_TRUE(res.weights.allFinite());
  EXPECT_GT(res.weights.minCoeff(), 0.0);
  EXPECT_LE(res.weights.maxCoeff(), 1.0 / settings.stability_delta);
}

TEST(Irwl1, RejectsNonPositiveDelta) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{3.0, 0.0}}, 0.5);
  Irwl1Settings settings;
  settings.stability_delta = 0.0;
  EXPECT_EQ(code_of([&] { irwl1(inst, settings); }), ErrorCode::NonPositiveParameter);
}

TEST(Irwl1, InfeasibleInstance) {
  auto inst = ProblemInstance::make(Matrix{{1.0}, {0.0}}, Vector{{0.0, 2.0}}, 1.0);
  EXPECT_EQ(code_of([&] { irwl1(inst); }), ErrorCode::InfeasibleInstance);
}

TEST(Irwl1, RoundedIsUsuallyNoDenserThanRoundedBpd) {
  std::mt19937_64 rng(14);
  int wins = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    auto inst = random_instance(rng, 10, 30, 0.3);
    if (irwl1_rounded(inst).sparsity() <= bpd_rounded(inst).sparsity()) ++wins;
  }
  EXPECT_GT(wins, seeds / 2);
}

TEST(Sparsify, KeepsSupportWhenItIsTheMinimalPrefix) {
  std::mt19937_64 rng(15);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_instance(rng, 8, 16, 0.3);
    Vector x = bpd_rounded(inst).x;
    // Re-rounding reaches a fixed point; the support never grows on the way.
    for (int pass = 0; pass < 16; ++pass) {
      const auto next = sparsify(inst, x);
      EXPECT_LE(next.sparsity(), count_support(x));
      if (next.support() == support_of(x)) break;
      x = next.x;
    }
    // At the fixed point, dropping the smallest entry of x must break feasibility.
    const IndexSet supp = support_of(x);
    if (supp.empty()) continue;
    IndexSet shorter = supp;
    shorter.erase(std::min_element(shorter.begin(), shorter.end(),
                                   [&](Index a, Index b) { return std::abs(x(a)) < std::abs(x(b)); }));
    EXPECT_GT(projection_residual_sq(inst.A, inst.b, shorter), inst.epsilon);
    EXPECT_EQ(sparsify(inst, x).support(), supp);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Sparsify, NoDenserThanThresholdedBpd) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 10, 30, 0.3);
    const auto raw = solve_bpd(inst);
    EXPECT_LE(sparsify(inst, raw.x).sparsity(), raw.sparsity());
  }
}

TEST(Sparsify, ZeroStaysZero) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{0.3, 0.4}}, 0.25);
  EXPECT_EQ(sparsify(inst, Vector::Zero(2)).x, Vector::Zero(2));
}

TEST(Heuristics, AllReturnFeasiblePoints) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 10, 25, 0.25);
    for (const Vector& x : {omp(inst).x, bpd_rounded(inst).x, irwl1_rounded(inst).x, irwl1(inst).x.x}) {
      EXPECT_LE(residual_sq(inst, x), inst.epsilon + 1e-6);
    }
  }
}

TEST(Heuristics, OracleIsNeverWorse) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = random_instance(rng, 6, 10, 0.3);
    const double best = brute_force_oracle(inst).objective;
    for (const Vector& x : {omp(inst).x, bpd_rounded(inst).x, irwl1_rounded(inst).x}) {
      EXPECT_LE(best, objective(inst, x) + 1e-9);
    }
  }
}
