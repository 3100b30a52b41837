// Serial versus OpenMP oracle enumeration, incremental versus direct Gram inverse.
#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "sparsecs/experiments/oracle.hpp"
#include "sparsecs/experiments/synthetic.hpp"
#include "sparsecs/rounding/rounding.hpp"

using namespace sparsecs;

namespace {

ProblemInstance bench_instance(Index n) {
  SyntheticSpec s;
  s.n = n;
  s.m = 8;
  s.k = 3;
  s.alpha = 0.1;
  s.seed = 42;
  return generate(s).instance;
}

void BM_OracleSerial(benchmark::State& state) {
  const ProblemInstance inst = bench_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle_serial(inst).objective);
}

void BM_OracleParallel(benchmark::State& state) {
  const ProblemInstance inst = bench_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(inst).objective);
}

struct GramFixture {
  Matrix A;
  Vector b;
  std::vector<Index> order;

  GramFixture(Index m, Index length) : A(m, length), b(m), order(length) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
    for (Index i = 0; i < m; ++i) b(i) = nd(rng);
    std::iota(order.begin(), order.end(), Index{0});
  }
};

void BM_GramIncremental(benchmark::State& state) {
  const GramFixture f(50, state.range(0));
  for (auto _ : state) {
    ProjectionState s = ProjectionState::empty(f.b);
    for (Index j : f.order) s = extend_gram_inverse(std::move(s), j, f.A.col(j));
    benchmark::DoNotOptimize(s.residual_sq);
  }
}

void BM_GramDirect(benchmark::State& state) {
  const GramFixture f(50, state.range(0));
  for (auto _ : state) {
    std::vector<Index> selected;
    for (Index j : f.order) {
      selected.push_back(j);
      benchmark::DoNotOptimize(direct_projection(f.A, f.b, selected).residual_sq);
    }
  }
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramIncremental)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GramDirect)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
