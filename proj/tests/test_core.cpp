#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sparsecs/core/instance_io.hpp"
#include "sparsecs/core/problem.hpp"
#include "sparsecs/core/ridge.hpp"

using namespace sparsecs;

namespace {

ProblemInstance identity2(double eps) {
  return ProblemInstance::make(Matrix::Identity(2, 2), Vector::Ones(2), eps, 1.0, Vector::Ones(2));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Validate, AcceptsWellFormedInstance) { EXPECT_NO_THROW(validate(identity2(0.1))); }

TEST(Validate, RejectsShapeMismatch) {
  auto inst = identity2(0.1);
  inst.b = Vector::Ones(3);
  EXPECT_EQ(code_of([&] { validate(inst); }), ErrorCode::DimensionMismatch);
}

TEST(Validate, RejectsNonPositiveParameters) {
  auto inst = identity2(0.1);
  inst.epsilon = 0.0;
  EXPECT_EQ(code_of([&] { validate(inst); }), ErrorCode::NonPositiveParameter);
  inst = identity2(0.1);
  inst.gamma = -1.0;
  EXPECT_EQ(code_of([&] { validate(inst); }), ErrorCode::NonPositiveParameter);
}

TEST(Validate, RejectsNonFiniteAndNegativeWeights) {
  auto inst = identity2(0.1);
  inst.A(0, 1) = std::nan("");
  EXPECT_EQ(code_of([&] { validate(inst); }), ErrorCode::NonFiniteData);
  inst = identity2(0.1);
  inst.weights(0) = -1.0;
  EXPECT_EQ(code_of([&] { validate(inst); }), ErrorCode::NegativeWeight);
}

TEST(Validate, DefaultGammaIsSqrtN) {
  auto inst = ProblemInstance::make(Matrix::Ones(2, 9), Vector::Ones(2), 0.5);
  EXPECT_DOUBLE_EQ(inst.gamma, 3.0);
  EXPECT_EQ(inst.weights, Vector::Ones(9));
}

TEST(Objective, HandEvaluated) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector::Ones(2), 1.0, 4.0);
  EXPECT_EQ(objective(inst, Vector::Zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(objective(inst, Vector{{2.0, 0.0}}), 2.0);
  auto inst3 = ProblemInstance::make(Matrix::Identity(3, 3), Vector::Ones(3), 1.0, 2.0, Vector{{1.0, 3.0, 1.0}});
  EXPECT_DOUBLE_EQ(objective(inst3, Vector{{1.0, 1.0, 0.0}}), 7.0);
}

TEST(Objective, ThresholdIsAField) {
  SolutionVector s{Vector{{1e-5, 1e-3, 0.0}}};
  EXPECT_EQ(s.sparsity(), 1u);
  s.support_threshold = 1e-6;
  EXPECT_EQ(s.sparsity(), 2u);
  EXPECT_EQ(s.support(), (IndexSet{0, 1}));
}

TEST(Objective, PermutationEquivariant) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 6;
    Vector w(n), x(n);
    for (Index i = 0; i < n; ++i) {
      w(i) = std::abs(nd(rng));
      x(i) = (trial + i) % 3 == 0 ? 0.0 : nd(rng);
    }
    auto inst = ProblemInstance::make(Matrix::Identity(n, n), Vector::Ones(n), 1.0, 1.7, w);
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector wp(n), xp(n);
    for (Index i = 0; i < n; ++i) {
      wp(i) = w(perm[i]);
      xp(i) = x(perm[i]);
    }
    auto instp = ProblemInstance::make(Matrix::Identity(n, n), Vector::Ones(n), 1.0, 1.7, wp);
    EXPECT_NEAR(objective(inst, x), objective(instp, xp), 1e-12);
  }
}

TEST(Residual, HandEvaluated) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{1.0, 0.0}}, 1.0);
  EXPECT_EQ(residual_sq(inst, Vector{{1.0, 0.0}}), 0.0);
  EXPECT_EQ(residual_sq(inst, Vector::Zero(2)), 1.0);
  auto inst2 = ProblemInstance::make(Matrix{{1.0, 2.0}, {0.0, 1.0}}, Vector{{1.0, 1.0}}, 1.0);
  EXPECT_EQ(residual_sq(inst2, Vector{{1.0, 0.0}}), 1.0);
}

TEST(Residual, NonnegativeAndZeroOnExactFit) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix A(4, 6);
    Vector x(6);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = std::round(4 * nd(rng));
    for (Index i = 0; i < 6; ++i) x(i) = std::round(3 * nd(rng));
    // Integer data keeps A x exact in floating point.
    auto inst = ProblemInstance::make(A, A * x, 1.0);
    EXPECT_EQ(residual_sq(inst, x), 0.0);
    Vector y(6);
    for (Index i = 0; i < 6; ++i) y(i) = nd(rng);
    EXPECT_GE(residual_sq(inst, y), 0.0);
  }
}

TEST(Projection, ResidualOfColumnSubsets) {
  Matrix A = Matrix::Identity(3, 3);
  Vector b{{1.0, 2.0, 3.0}};
  EXPECT_NEAR(projection_residual_sq(A, b, {0}), 13.0, 1e-12);
  EXPECT_NEAR(projection_residual_sq(A, b, {}), 14.0, 1e-12);
  EXPECT_NEAR(projection_residual_sq(A, b), 0.0, 1e-12);
  EXPECT_EQ(complement({0, 2}, 4), (IndexSet{1, 3}));
  EXPECT_EQ(scatter(Vector{{5.0, 6.0}}, {1, 3}, 4), (Vector{{0.0, 5.0, 0.0, 6.0}}));
}

TEST(InstanceIo, RoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Matrix A(3, 5);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
  Vector b(3);
  for (Index i = 0; i < 3; ++i) b(i) = nd(rng);
  Vector w{{1.0, 0.5, 0.0, 2.0, 1.0 / 3.0}};
  auto inst = ProblemInstance::make(A, b, 0.123456789, 1.0 / 7.0, w);
  auto back = parse_instance(format_instance(inst));
  EXPECT_EQ(back.A, inst.A);
  EXPECT_EQ(back.b, inst.b);
  EXPECT_EQ(back.epsilon, inst.epsilon);
  EXPECT_EQ(back.gamma, inst.gamma);
  EXPECT_EQ(back.weights, inst.weights);
}

TEST(InstanceIo, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_instance("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_instance(R"({"A": [[1]], "b": [1]})"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_instance(R"({"A": [[1, 2], [3]], "b": [1, 2], "epsilon": 1})"); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_instance(R"({"A": [[1]], "b": [1, 2], "epsilon": 1})"); }),
            ErrorCode::DimensionMismatch);
  auto inst = parse_instance(R"({"A": [[1, 0, 0, 0]], "b": [2], "epsilon": 0.5})");
  EXPECT_DOUBLE_EQ(inst.gamma, 2.0);
}

// Independent oracle for the weighted min-norm fit: bisection on the Lagrange
// multiplier of the normal equations (mu W^2 + A'A) x = A'b solved by LDLT.
TEST(MinNormFit, MatchesNormalEquationBisection) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 6, k = 1 + trial % 4;
    Matrix A(m, k);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
    Vector b(m), w(k);
    for (Index i = 0; i < m; ++i) b(i) = nd(rng);
    for (Index i = 0; i < k; ++i) w(i) = 0.5 + std::abs(nd(rng));
    const double ls = projection_residual_sq(A, b);
    const double eps = ls + 0.5 * (b.squaredNorm() - ls);
    auto fit = min_weighted_norm_fit(A, b, eps, w);
    ASSERT_TRUE(fit.has_value());

    const Matrix W2 = w.array().square().matrix().asDiagonal();
    auto solve_mu = [&](double mu) { return Vector((mu * W2 + A.transpose() * A).ldlt().solve(A.transpose() * b)); };
    double lo = 1e-12, hi = 1e12;
    for (int it = 0; it < 300; ++it) {
      const double mid = std::sqrt(lo * hi);
      ((A * solve_mu(mid) - b).squaredNorm() <= eps ? lo : hi) = mid;
    }
    const Vector ref = solve_mu(lo);
    EXPECT_LE((A * *fit - b).squaredNorm(), eps + 1e-9);
    EXPECT_NEAR((w.asDiagonal() * *fit).squaredNorm(), (w.asDiagonal() * ref).squaredNorm(), 1e-7);
  }
}

TEST(MinNormFit, EdgeCases) {
  Matrix A{{1.0}};
  EXPECT_FALSE(min_norm_fit(Matrix{{1.0}, {0.0}}, Vector{{0.0, 3.0}}, 1.0).has_value());
  auto zero = min_norm_fit(A, Vector{{0.5}}, 1.0);
  ASSERT_TRUE(zero);
  EXPECT_EQ((*zero)(0), 0.0);
  auto one = min_norm_fit(A, Vector{{2.0}}, 1.0);
  ASSERT_TRUE(one);
  EXPECT_NEAR((*one)(0), 1.0, 1e-9);
  // A zero-weight column absorbs the fit at no cost.
  auto free_fit = min_weighted_norm_fit(Matrix{{1.0, 1.0}}, Vector{{2.0}}, 0.25, Vector{{0.0, 1.0}});
  ASSERT_TRUE(free_fit);
  EXPECT_NEAR((*free_fit)(1), 0.0, 1e-12);
  EXPECT_NEAR((*free_fit)(0), 2.0, 1e-12);
}
