#include "sparsecs/rounding/rounding.hpp"

#include <algorithm>
#include <numeric>

namespace sparsecs {

ProjectionState ProjectionState::empty(const Vector& b) {
  ProjectionState state;
  state.columns.resize(b.size(), 0);
  state.gram_inverse.resize(0, 0);
  state.coefficients.resize(0);
  state.residual = b;
  state.residual_sq = b.squaredNorm();
  return state;
}

namespace {

// Leaves the state untouched when it throws.
void extend_in_place(ProjectionState& state, Index index, const Vector& column) {
  if (column.size() != state.residual.size()) {
    throw Error(ErrorCode::DimensionMismatch, "column length differs from the residual");
  }
  const Index t = state.coefficients.size();
  const Vector u = state.columns.transpose() * column;  // V = A_I' a
  const Vector cu = state.gram_inverse * u;
  const double d = column.squaredNorm();
  const double schur = d - u.dot(cu);
  if (std::abs(schur) <= 1e-12 * std::max(1.0, d)) {
    throw Error(ErrorCode::SingularSchurComplement, "column lies in the span of the selected columns");
  }

  Matrix inv(t + 1, t + 1);
  inv.topLeftCorner(t, t) = state.gram_inverse + cu * cu.transpose() / schur;
  inv.topRightCorner(t, 1) = -cu / schur;
  inv.bottomLeftCorner(1, t) = -cu.transpose() / schur;
  inv(t, t) = 1.0 / schur;

  // New coefficient is a'r / schur; the old ones shift along -C u.
  const double beta = column.dot(state.residual) / schur;
  Vector coef(t + 1);
  coef.head(t) = state.coefficients - beta * cu;
  coef(t) = beta;

  state.columns.conservativeResize(Eigen::NoChange, t + 1);
  state.columns.col(t) = column;
  state.residual -= beta * (column - state.columns.leftCols(t) * cu);
  state.residual_sq = state.residual.squaredNorm();
  state.gram_inverse = std::move(inv);
  state.coefficients = std::move(coef);
  state.selected.push_back(index);
}

}  // namespace

ProjectionState extend_gram_inverse(ProjectionState state, Index index, const Vector& column) {
  extend_in_place(state, index, column);
  return state;
}

ProjectionState direct_projection(const Matrix& A, const Vector& b, const IndexSet& selected) {
  ProjectionState state = ProjectionState::empty(b);
  state.selected = selected;
  state.columns = A(Eigen::all, selected);
  if (selected.empty()) return state;
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(state.columns);
  state.coefficients = cod.solve(b);
  const Matrix gram = state.columns.transpose() * state.columns;
  const Eigen::CompleteOrthogonalDecomposition<Matrix> gram_cod(gram);
  state.gram_inverse = gram_cod.pseudoInverse();
  state.residual = b - state.columns * state.coefficients;
  state.residual_sq = state.residual.squaredNorm();
  state.rank_deficient = cod.rank() < static_cast<Index>(selected.size());
  return state;
}

void add_column(ProjectionState& state, const Matrix& A, const Vector& b, Index index) {
  if (!state.rank_deficient) {
    try {
      extend_in_place(state, index, A.col(index));
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSchurComplement) throw;
    }
  }
  IndexSet selected = state.selected;
  selected.push_back(index);
  state = direct_projection(A, b, selected);
  state.rank_deficient = true;
}

IndexSet score_order(const Vector& score) {
  IndexSet order(static_cast<std::size_t>(score.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(score(a)) > std::abs(score(b)); });
  return order;
}

SolutionVector greedy_round(const ProblemInstance& instance, const Vector& score) {
  validate(instance);
  const Index n = instance.cols();
  if (score.size() != n) throw Error(ErrorCode::DimensionMismatch, "score length differs from n");
  SolutionVector out{Vector::Zero(n)};
  if (instance.b.squaredNorm() <= instance.epsilon) return out;
  if (projection_residual_sq(instance.A, instance.b) > instance.epsilon) {
    throw Error(ErrorCode::NoFeasibleCompletion, "all columns together miss the residual budget");
  }

  ProjectionState state = ProjectionState::empty(instance.b);
  for (Index i : score_order(score)) {
    add_column(state, instance.A, instance.b, i);
    if (state.residual_sq <= instance.epsilon) break;
  }
  out.x = scatter(state.coefficients, state.selected, n);
  return out;
}

}  // namespace sparsecs
