#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sparsecs/core/error.hpp"

namespace sparsecs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sorted list of coordinate indices (0-based).
using IndexSet = std::vector<Index>;

inline constexpr double kDefaultSupportThreshold = 1e-4;

/// Sensing data for   min ||x||_0 + (1/gamma) ||W x||^2   s.t.  ||A x - b||^2 <= epsilon.
///
/// Instances are immutable once validated and may be shared across threads.
struct ProblemInstance {
  Matrix A;
  Vector b;
  double epsilon = 0.0;  // squared-residual budget
  double gamma = 0.0;    // regularization weight
  Vector weights;        // diagonal of W

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }

  /// Builds an instance with unit weights and gamma = sqrt(n) unless given.
  static ProblemInstance make(Matrix A, Vector b, double epsilon,
                              std::optional<double> gamma = std::nullopt,
                              std::optional<Vector> weights = std::nullopt);

  /// Column-restricted copy (weights follow their columns).
  ProblemInstance restrict_columns(const IndexSet& columns) const;
};

/// A candidate vector together with the threshold used to count its support.
struct SolutionVector {
  Vector x;
  double support_threshold = kDefaultSupportThreshold;

  std::size_t sparsity() const;
  IndexSet support() const;
};

/// Throws Error on the first violated invariant.
void validate(const ProblemInstance& instance);

double residual_sq(const ProblemInstance& instance, const Vector& x);

/// ||x||_0 + (1/gamma) ||W x||^2, counting |x_i| > threshold as nonzero.
double objective(const ProblemInstance& instance, const Vector& x,
                 double support_threshold = kDefaultSupportThreshold);

std::size_t count_support(const Vector& x, double threshold = kDefaultSupportThreshold);
IndexSet support_of(const Vector& x, double threshold = kDefaultSupportThreshold);

/// Squared residual of the least-squares projection of b onto the span of the
/// given columns; the two-argument form uses every column.
double projection_residual_sq(const Matrix& A, const Vector& b, const IndexSet& columns);
double projection_residual_sq(const Matrix& A, const Vector& b);

/// Embeds a vector defined on `columns` back into R^n.
Vector scatter(const Vector& values, const IndexSet& columns, Index n);

/// Complement of `set` within [0, n).
IndexSet complement(const IndexSet& set, Index n);

}  // namespace sparsecs
