#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "sparsecs/bnb/bnb.hpp"
#include "sparsecs/experiments/oracle.hpp"
#include "sparsecs/experiments/synthetic.hpp"
#include "sparsecs/relaxations/relaxations.hpp"
#include "support/test_util.hpp"

using namespace sparsecs;
using sparsecs::testutil::code_of;
using sparsecs::testutil::gaussian_matrix;
using sparsecs::testutil::gaussian_vector;
using sparsecs::testutil::random_instance;
using sparsecs::testutil::synthetic;

namespace {

Node node_with(double lower, IndexSet I0 = {}, IndexSet I1 = {}) {
  Node node;
  node.lower = lower;
  node.I0 = std::move(I0);
  node.I1 = std::move(I1);
  return node;
}

}  // namespace

TEST(NodePool, SingleNode) {
  NodePool pool;
  pool.insert(node_with(1.5, {3}));
  const Node n = select_node(pool);
  EXPECT_EQ(n.I0, IndexSet{3});
  EXPECT_TRUE(pool.empty());
}

TEST(NodePool, LeastBoundWithInsertionTieBreak) {
  NodePool pool;
  pool.insert(node_with(3.0, {0}));
  pool.insert(node_with(2.5, {1}));
  pool.insert(node_with(2.5, {2}));
  EXPECT_EQ(select_node(pool).I0, IndexSet{1});
  EXPECT_EQ(select_node(pool).I0, IndexSet{2});
  EXPECT_EQ(select_node(pool).I0, IndexSet{0});
}

TEST(NodePool, EmptyPoolThrows) {
  NodePool pool;
  EXPECT_EQ(code_of([&] { select_node(pool); }), ErrorCode::EmptyPool);
  EXPECT_EQ(pool.min_lower(), std::numeric_limits<double>::infinity());
}

TEST(NodePool, PrunedNodesAreNeverSelected) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  NodePool pool;
  for (int i = 0; i < 200; ++i) pool.insert(node_with(u(rng)));
  EXPECT_GT(pool.prune(4.0), 0u);
  double last = -1.0;
  while (!pool.empty()) {
    const Node n = select_node(pool);
    EXPECT_LT(n.lower, 4.0);
    EXPECT_GE(n.lower, last);
    last = n.lower;
  }
}

TEST(BranchIndex, ExactHalfWins) {
  EXPECT_EQ(select_branch_index(Node{}, Vector{{1.0, 0.5, 0.0}}), 1);
}

TEST(BranchIndex, EqualDistanceGoesToLowestIndex) {
  EXPECT_EQ(select_branch_index(Node{}, Vector{{0.4, 0.6}}), 0);
}

TEST(BranchIndex, FixedIndicesExcluded) {
  EXPECT_EQ(select_branch_index(node_with(0.0, {}, {1}), Vector{{0.9, 0.5, 0.45}}), 2);
}

TEST(BranchIndex, CompletePatternThrows) {
  EXPECT_EQ(code_of([] { select_branch_index(node_with(0.0, {0}, {1}), Vector{{0.0, 1.0}}); }),
            ErrorCode::CompletePattern);
}

TEST(Cuts, SupersetIsCut) {
  const std::vector<FeasibilityCut> cuts{{{1, 2}}};
  EXPECT_TRUE(apply_cuts(node_with(0.0, {1, 2, 5}), cuts));
  EXPECT_FALSE(apply_cuts(node_with(0.0, {1}), cuts));
  EXPECT_FALSE(apply_cuts(node_with(0.0, {1, 2}), {}));
}

TEST(Cuts, InfeasibleZeroSetsStayInfeasibleWhenEnlarged) {
  // Soundness of cuts: a zero set whose complement misses epsilon keeps missing it.
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_instance(rng, 6, 10, 0.1);
    IndexSet zero;
    for (Index i = 0; i < 10; ++i) {
      if (rng() % 2) zero.push_back(i);
    }
    if (projection_residual_sq(inst.A, inst.b, complement(zero, 10)) <= inst.epsilon) continue;
    IndexSet bigger = zero;
    const Index extra = static_cast<Index>(rng() % 10);
    if (!std::binary_search(bigger.begin(), bigger.end(), extra)) {
      bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), extra), extra);
    }
    EXPECT_TRUE(apply_cuts(node_with(0.0, bigger), {{zero}}));
    EXPECT_GT(projection_residual_sq(inst.A, inst.b, complement(bigger, 10)), inst.epsilon);
  }
}

TEST(Backbone, ExactlySparseBpdSolution) {
  auto inst = ProblemInstance::make(Matrix::Identity(3, 3), Vector{{3.0, 0.0, 0.0}}, 1.0);
  EXPECT_EQ(compute_backbone(inst), IndexSet{0});
}

TEST(Backbone, ZeroThresholdKeepsEverything) {
  std::mt19937_64 rng(23);
  auto inst = random_instance(rng, 5, 9, 0.3);
  EXPECT_EQ(compute_backbone(inst, 0.0).size(), 9u);
}

TEST(Backbone, InfeasibleInstance) {
  auto inst = ProblemInstance::make(Matrix{{1.0}, {0.0}}, Vector{{0.0, 2.0}}, 1.0);
  EXPECT_EQ(code_of([&] { compute_backbone(inst); }), ErrorCode::InfeasibleInstance);
}

TEST(Backbone, UsuallyContainsPlantedSupport) {
  // Calibrated: at sigma = 10 this (n, m) makes every draw infeasible, so the
  // noise level is raised until the residual budget is reachable.
  int contains = 0;
  int planted = 0;
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SyntheticSpec spec;
    spec.n = 50;
    spec.m = 100;
    spec.k = 5;
    spec.alpha = 0.05;
    spec.sigma = 300;
    spec.seed = seed;
    const auto data = generate(spec);
    const IndexSet bb = compute_backbone(data.instance);
    bool all = true;
    for (Index i : support_of(data.x_true, 0.0)) {
      const bool in = std::binary_search(bb.begin(), bb.end(), i);
      recovered += in;
      all = all && in;
      ++planted;
    }
    contains += all;
  }
  EXPECT_GE(contains, 40);
  EXPECT_GE(static_cast<double>(recovered) / planted, 0.8);
}

TEST(BnB, InfeasibleGuard) {
  // b orthogonal to the column space and a small budget.
  auto inst = ProblemInstance::make(Matrix{{1.0}, {0.0}}, Vector{{0.0, 2.0}}, 0.5);
  const auto res = solve(inst);
  EXPECT_EQ(res.status, BnBStatus::Infeasible);
  EXPECT_EQ(res.nodes_explored, 0u);
}

TEST(BnB, TrivialZeroGuard) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{0.3, 0.4}}, 0.25);
  const auto res = solve(inst);
  EXPECT_EQ(res.status, BnBStatus::TrivialZero);
  EXPECT_EQ(res.x_best, Vector::Zero(2));
  EXPECT_EQ(res.upper, 0.0);
  EXPECT_EQ(res.gap, 0.0);
}

TEST(BnB, RejectsNegativeDelta) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{3.0, 0.0}}, 0.5);
  BnBConfig config;
  config.delta = -0.1;
  EXPECT_EQ(code_of([&] { solve(inst, config); }), ErrorCode::NonPositiveParameter);
}

TEST(BnB, MatchesOracleOnSmallInstances) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 5 + trial % 8;
    auto inst = random_instance(rng, 4 + trial % 3, n, 0.2 + 0.1 * (trial % 4));
    const auto oracle = brute_force_oracle(inst);
    const auto res = solve(inst);
    ASSERT_EQ(res.status, BnBStatus::OptimalWithinDelta);
    EXPECT_NEAR(res.upper, oracle.objective, 1e-6) << "trial " << trial;
    EXPECT_EQ(count_support(res.x_best, 0.0), oracle.support.size()) << "trial " << trial;
    EXPECT_LE(residual_sq(inst, res.x_best), inst.epsilon * (1 + 1e-9));
    EXPECT_LE(res.lower, res.upper + 1e-9);
    EXPECT_LE(res.nodes_explored, (std::size_t{1} << (n + 1)) - 1);
  }
}

TEST(BnB, StrictBoundsAlsoMatchOracle) {
  std::mt19937_64 rng(25);
  BnBConfig config;
  config.strict_bounds = true;
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 5, 8, 0.3, 0.5);
    const auto res = solve(inst, config);
    ASSERT_EQ(res.status, BnBStatus::OptimalWithinDelta);
    EXPECT_NEAR(res.upper, brute_force_oracle(inst).objective, 1e-6);
  }
}

TEST(BnB, SyntheticInstancesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto inst = synthetic(10, 8, 2, seed % 2 ? 0.1 : 0.3, seed);
    const auto res = solve(inst);
    const auto oracle = brute_force_oracle(inst);
    EXPECT_NEAR(res.upper, oracle.objective, 1e-6);
    EXPECT_EQ(count_support(res.x_best, 0.0), oracle.support.size());
  }
}

TEST(BnB, PositiveDeltaStopsWithinTolerance) {
  std::mt19937_64 rng(26);
  BnBConfig config;
  config.delta = 0.2;
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 6, 12, 0.3);
    const auto res = solve(inst, config);
    ASSERT_EQ(res.status, BnBStatus::OptimalWithinDelta);
    EXPECT_LE(res.gap, config.delta);
    const double opt = brute_force_oracle(inst).objective;
    EXPECT_LE(res.lower, opt + 1e-9);
    EXPECT_LE(res.upper * (1.0 - config.delta), opt + 1e-9);
  }
}

TEST(BnB, BoundsAreMonotoneAndIncumbentFeasible) {
  std::mt19937_64 rng(27);
  auto inst = random_instance(rng, 8, 16, 0.2);
  BnBConfig config;
  double last_upper = std::numeric_limits<double>::infinity();
  double last_lower = -std::numeric_limits<double>::infinity();
  int calls = 0;
  config.observer = [&](const BnBProgress& p) {
    EXPECT_LE(p.upper, last_upper);
    EXPECT_GE(p.lower, last_lower);
    EXPECT_LE(p.lower, p.upper + 1e-9);
    EXPECT_LE(residual_sq(inst, *p.x_best), inst.epsilon * (1 + 1e-9));
    last_upper = p.upper;
    last_lower = p.lower;
    ++calls;
    return true;
  };
  const auto res = solve(inst, config);
  EXPECT_GT(calls, 0);
  EXPECT_EQ(res.status, BnBStatus::OptimalWithinDelta);
}

TEST(BnB, ObserverStopGivesCertifiedGap) {
  std::mt19937_64 rng(28);
  auto inst = random_instance(rng, 7, 14, 0.2);
  BnBConfig config;
  config.observer = [](const BnBProgress& p) { return p.nodes < 3; };
  const auto res = solve(inst, config);
  const double opt = brute_force_oracle(inst).objective;
  EXPECT_LE(res.lower, opt + 1e-9);
  EXPECT_GE(res.upper, opt - 1e-9);
  EXPECT_LE(residual_sq(inst, res.x_best), inst.epsilon * (1 + 1e-9));
  if (res.gap > 0) EXPECT_EQ(res.status, BnBStatus::TimeLimit);
}

TEST(BnB, ZeroTimeLimitStillReturnsIncumbent) {
  std::mt19937_64 rng(29);
  auto inst = random_instance(rng, 8, 20, 0.2);
  BnBConfig config;
  config.time_limit = std::chrono::duration<double>(0.0);
  const auto res = solve(inst, config);
  EXPECT_EQ(res.nodes_explored, 0u);
  EXPECT_LE(residual_sq(inst, res.x_best), inst.epsilon * (1 + 1e-9));
  EXPECT_TRUE(std::isfinite(res.upper));
}

TEST(BnB, Deterministic) {
  std::mt19937_64 rng(30);
  auto inst = random_instance(rng, 7, 14, 0.25);
  const auto a = solve(inst);
  const auto b = solve(inst);
  EXPECT_EQ(a.x_best, b.x_best);
  EXPECT_EQ(a.nodes_explored, b.nodes_explored);
  EXPECT_EQ(a.lower, b.lower);
}

TEST(BnB, SerialChildrenMatchParallel) {
  std::mt19937_64 rng(31);
  auto inst = random_instance(rng, 7, 14, 0.25);
  BnBConfig serial;
  serial.parallel_children = false;
  const auto a = solve(inst);
  const auto b = solve(inst, serial);
  EXPECT_EQ(a.x_best, b.x_best);
  EXPECT_EQ(a.nodes_explored, b.nodes_explored);
}

TEST(BnB, BackboneRestrictsColumns) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng, 5, 10, 0.3);
    const auto oracle = brute_force_oracle(inst);
    BnBConfig config;
    config.backbone = oracle.support;
    const auto res = solve(inst, config);
    EXPECT_NEAR(res.upper, oracle.objective, 1e-6);
    for (Index i : support_of(res.x_best, 0.0)) {
      EXPECT_TRUE(std::binary_search(oracle.support.begin(), oracle.support.end(), i));
    }
    IndexSet all(10);
    std::iota(all.begin(), all.end(), Index{0});
    config.backbone = all;
    EXPECT_NEAR(solve(inst, config).upper, oracle.objective, 1e-6);
  }
}

TEST(BnB, ProgressLogIsKeyValue) {
  std::mt19937_64 rng(33);
  auto inst = random_instance(rng, 6, 12, 0.2);
  std::ostringstream log;
  BnBConfig config;
  config.log_every = 1;
  config.log = &log;
  const auto res = solve(inst, config);
  std::istringstream lines(log.str());
  std::string line;
  int progress_lines = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("bnb ", 0) != 0) continue;
    std::map<std::string, std::string> kv;
    std::istringstream fields(line.substr(4));
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      ASSERT_NE(eq, std::string::npos) << line;
      kv[field.substr(0, eq)] = field.substr(eq + 1);
    }
    for (const char* key : {"nodes", "upper", "lower", "gap", "elapsed"}) EXPECT_TRUE(kv.count(key)) << key;
    ++progress_lines;
  }
  EXPECT_GE(progress_lines, static_cast<int>(res.nodes_explored));
}

TEST(BnB, WarnsWhenGammaBelowGamma0) {
  // Overdetermined full-rank design: gamma0 is finite.
  std::mt19937_64 rng(34);
  Matrix A = gaussian_matrix(rng, 12, 4);
  Vector b = gaussian_vector(rng, 12);
  const double ls = projection_residual_sq(A, b);
  auto inst = ProblemInstance::make(A, b, ls + 0.3 * (b.squaredNorm() - ls), 1e-3);
  ASSERT_GT(compute_gamma0(inst), inst.gamma);
  const auto res = solve(inst);
  EXPECT_FALSE(res.warnings.empty());
  BnBConfig strict;
  strict.strict_bounds = true;
  EXPECT_TRUE(solve(inst, strict).warnings.empty());
}

TEST(BnB, CutsAreAddedOnTightBudgets) {
  // A tight budget makes many zero sets infeasible; the answer must still match the oracle.
  std::mt19937_64 rng(35);
  std::size_t cuts = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 8, 10, 0.02);
    const auto res = solve(inst);
    cuts += res.cuts_added;
    EXPECT_NEAR(res.upper, brute_force_oracle(inst).objective, 1e-6);
  }
  EXPECT_GT(cuts, 0u);
}
