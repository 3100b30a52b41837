#pragma once

#include <vector>

#include "sparsecs/core/conic.hpp"
#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Orthogonal matching pursuit: adds argmax_i |a_i' r| (lowest index on ties)
/// and refits by least squares until ||r||^2 <= epsilon.
/// Throws NoFeasibleCompletion when all columns together miss epsilon.
SolutionVector omp(const ProblemInstance& instance);

/// OMP with its selection order and the squared residual after each step
/// (residual_sq[0] = ||b||^2).
struct OmpTrace {
  SolutionVector x;
  IndexSet order;
  std::vector<double> residual_sq;
};
OmpTrace omp_trace(const ProblemInstance& instance);

struct Irwl1Settings {
  double stability_delta = 1e-4;
  int max_iters = 50;
  double step_tol = 1e-6;  // stop when ||x_t - x_{t-1}|| <= step_tol
};

struct Irwl1Result {
  SolutionVector x;
  int iterations = 0;
  Vector weights;  // weights of the last solve
};

/// Iteratively reweighted L1: weighted BPD with w_i <- 1 / (|x_i| + delta),
/// starting from unit weights.
Irwl1Result irwl1(const ProblemInstance& instance, const Irwl1Settings& settings = {},
                  const ConicSettings& conic = {});

/// Greedy rounding with score |x|.
SolutionVector sparsify(const ProblemInstance& instance, const Vector& x);

/// BPD followed by sparsify.
SolutionVector bpd_rounded(const ProblemInstance& instance, const ConicSettings& conic = {});

/// IRWL1 followed by sparsify.
SolutionVector irwl1_rounded(const ProblemInstance& instance, const Irwl1Settings& settings = {},
                             const ConicSettings& conic = {});

}  // namespace sparsecs
