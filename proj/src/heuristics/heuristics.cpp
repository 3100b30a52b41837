#include "sparsecs/heuristics/heuristics.hpp"

#include "sparsecs/relaxations/relaxations.hpp"
#include "sparsecs/rounding/rounding.hpp"

namespace sparsecs {

SolutionVector omp(const ProblemInstance& instance) { return omp_trace(instance).x; }

OmpTrace omp_trace(const ProblemInstance& instance) {
  validate(instance);
  const Index n = instance.cols();
  OmpTrace out{SolutionVector{Vector::Zero(n)}, {}, {instance.b.squaredNorm()}};
  if (instance.b.squaredNorm() <= instance.epsilon) return out;
  if (projection_residual_sq(instance.A, instance.b) > instance.epsilon) {
    throw Error(ErrorCode::NoFeasibleCompletion, "all columns together miss the residual budget");
  }

  ProjectionState state = ProjectionState::empty(instance.b);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  while (state.residual_sq > instance.epsilon && static_cast<Index>(state.selected.size()) < n) {
    const Vector corr = instance.A.transpose() * state.residual;
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || std::abs(corr(i)) > std::abs(corr(best))) best = i;
    }
    taken[static_cast<std::size_t>(best)] = true;
    add_column(state, instance.A, instance.b, best);
    out.residual_sq.push_back(state.residual_sq);
  }
  out.x.x = scatter(state.coefficients, state.selected, n);
  out.order = state.selected;
  return out;
}

Irwl1Result irwl1(const ProblemInstance& instance, const Irwl1Settings& settings, const ConicSettings& conic) {
  validate(instance);
  if (!(settings.stability_delta > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "stability delta must be positive");
  }
  if (settings.max_iters < 1) throw Error(ErrorCode::NonPositiveParameter, "max_iters must be positive");
  Irwl1Result result;
  result.weights = Vector::Ones(instance.cols());
  Vector previous;
  for (int it = 0; it < settings.max_iters; ++it) {
    // Weighted L1 is invariant to a common scale; unit mean keeps the program well scaled.
    result.x = solve_weighted_bpd(instance, result.weights / result.weights.mean(), conic);
    result.iterations = it + 1;
    if (previous.size() && (result.x.x - previous).norm() <= settings.step_tol) break;
    previous = result.x.x;
    if (it + 1 == settings.max_iters) break;
    result.weights = (result.x.x.cwiseAbs().array() + settings.stability_delta).inverse().matrix();
  }
  return result;
}

SolutionVector sparsify(const ProblemInstance& instance, const Vector& x) {
  return greedy_round(instance, x.cwiseAbs());
}

SolutionVector bpd_rounded(const ProblemInstance& instance, const ConicSettings& conic) {
  return sparsify(instance, solve_bpd(instance, conic).x);
}

SolutionVector irwl1_rounded(const ProblemInstance& instance, const Irwl1Settings& settings,
                             const ConicSettings& conic) {
  return sparsify(instance, irwl1(instance, settings, conic).x.x);
}

}  // namespace sparsecs
