#pragma once

#include <limits>

#include "sparsecs/core/conic.hpp"
#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Optimal (x, z, theta) of a perspective-type relaxation.
struct RelaxationSolution {
  Vector x;
  Vector z;
  Vector theta;
  double objective = std::numeric_limits<double>::quiet_NaN();
  SolverStatus status;
};

/// Feasible point of the node dual and its objective value.
struct DualPoint {
  Vector nu;
  double objective = 0.0;
};

/// Node relaxation result: the minimizer, a valid lower bound on every
/// completion of the node, and the z values used for branching.
struct NodeRelaxation {
  SolutionVector x;
  double lower_bound = 0.0;
  Vector z;
  SolverStatus status;
};

/// min ||x||_1  s.t. ||Ax - b||^2 <= epsilon (instance weights ignored).
SolutionVector solve_bpd(const ProblemInstance& instance, const ConicSettings& settings = {});

/// min ||diag(weights) x||_1  s.t. ||Ax - b||^2 <= epsilon.
SolutionVector solve_weighted_bpd(const ProblemInstance& instance, const Vector& weights,
                                  const ConicSettings& settings = {});

/// min sum z + (1/gamma) sum w^2 theta  s.t.  x_i^2 <= z_i theta_i, 0 <= z <= 1,
/// ||Ax - b||^2 <= epsilon.
RelaxationSolution solve_perspective_relaxation(const ProblemInstance& instance,
                                                const ConicSettings& settings = {});

/// The perspective relaxation with -M z_i <= w_i x_i <= M z_i added.
RelaxationSolution solve_bigm_relaxation(const ProblemInstance& instance, double big_m,
                                         const ConicSettings& settings = {});

/// Node bound with x_{I0} = 0 and the perspective terms eliminated:
///   |I1| + (1/gamma) sum_{I1} w_i^2 x_i^2 + (2/sqrt(gamma)) sum_{free} w_i |x_i|.
/// Throws Error(NodeInfeasible) when no x with x_{I0} = 0 meets the residual budget.
NodeRelaxation solve_node_primal(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                                 const ConicSettings& settings = {});

/// Node bound from the perspective program itself with z fixed on I0 and I1;
/// valid for every gamma. Same error contract as solve_node_primal.
NodeRelaxation solve_node_perspective(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                                      const ConicSettings& settings = {});

/// Maximizes the dual of solve_node_primal over nu. Falls back to nu = 0 when
/// the solver does not converge.
DualPoint solve_node_dual(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                          const ConicSettings& settings = {});

/// Dual objective at nu, or -infinity when nu violates a dual constraint by more than `tol`.
double node_dual_value(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1, const Vector& nu,
                       double tol = 1e-8);

/// max_i max_{||Ax-b||^2 <= eps} (w_i x_i)^2, from the thin SVD of A. Returns
/// +infinity when some weighted coordinate is unbounded over the residual set.
double compute_gamma0(const ProblemInstance& instance);

/// The same quantity by 2n conic solves (maximize +-w_i x_i over the residual ball).
double compute_gamma0_conic(const ProblemInstance& instance, const ConicSettings& settings = {});

/// Point on the ridge path x(lambda) = (I/lambda + A'A)^{-1} A'b whose residual
/// equals epsilon, located by bisection on lambda in [1e-10, 1e10].
struct RidgePathPoint {
  Vector x;
  double lambda = 0.0;
  double residual_sq = 0.0;
};
RidgePathPoint ridge_path_point(const ProblemInstance& instance);

/// (1/gamma) (min_norm_sq - ||x(lambda_eps)||^2): the additive slack between the
/// regularized and unregularized optima, given the squared norm of a
/// minimum-norm sparsest solution. Throws DegenerateInstance when ||b||^2 <= epsilon.
double regularization_gap_bound(const ProblemInstance& instance, double min_norm_sq);

}  // namespace sparsecs
