#pragma once

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Least-squares fit of b on a growing ordered column set I_t.
///
/// Invariants: residual = b - columns * coefficients, and gram_inverse is the
/// pseudo-inverse of columns' * columns.
struct ProjectionState {
  IndexSet selected;  // insertion order, not sorted
  Matrix columns;     // A(:, selected), m x |I_t|
  Matrix gram_inverse;
  Vector coefficients;
  Vector residual;
  double residual_sq = 0.0;
  bool rank_deficient = false;  // once set, later steps recompute directly

  /// State for I_0 = {} (residual = b).
  static ProjectionState empty(const Vector& b);
};

/// Adds one column by the block-inverse identity in O(t^2 + m t).
/// Throws SingularSchurComplement when the column is (numerically) in the span
/// of the selected ones, i.e. |d - u' C u| <= 1e-12 max(1, a'a).
ProjectionState extend_gram_inverse(ProjectionState state, Index index, const Vector& column);

/// Rebuilds the state for the given columns from a complete orthogonal
/// decomposition (minimum-norm least squares, pseudo-inverse Gram).
ProjectionState direct_projection(const Matrix& A, const Vector& b, const IndexSet& selected);

/// Adds a column, falling back to direct_projection when the Schur complement
/// is singular or the state is already rank deficient.
void add_column(ProjectionState& state, const Matrix& A, const Vector& b, Index index);

/// Columns ordered by decreasing |score|, ties by lowest index.
IndexSet score_order(const Vector& score);

/// Adds columns in score order until ||A x - b||^2 <= epsilon; x is the
/// least-squares fit on the selected prefix. Throws NoFeasibleCompletion when
/// all n columns cannot reach epsilon.
SolutionVector greedy_round(const ProblemInstance& instance, const Vector& score);

}  // namespace sparsecs
