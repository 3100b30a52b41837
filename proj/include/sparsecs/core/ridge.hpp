#pragma once

#include <optional>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Minimizer of ||diag(w) x||^2 subject to ||A x - b||^2 <= epsilon, or nullopt
/// when even the least-squares residual exceeds epsilon.
///
/// Zero-weight columns are fitted freely by least squares; the remaining
/// coordinates follow the ridge path x(mu) = (mu W^2 + A'A)^{-1} A'b, with mu
/// chosen by bisection so the residual meets epsilon from below.
std::optional<Vector> min_weighted_norm_fit(const Matrix& A, const Vector& b, double epsilon,
                                            const Vector& weights);

/// Same with unit weights.
std::optional<Vector> min_norm_fit(const Matrix& A, const Vector& b, double epsilon);

}  // namespace sparsecs
