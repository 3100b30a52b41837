#include "sparsecs/experiments/metrics.hpp"

#include <cmath>

namespace sparsecs {

Metrics evaluate(const Vector& x_true, const Vector& x_hat, double threshold) {
  if (x_true.size() != x_hat.size()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  const Index n = x_true.size();
  std::size_t tp = 0, tn = 0, predicted = 0;
  for (Index i = 0; i < n; ++i) {
    const bool truth = std::abs(x_true(i)) > threshold;
    const bool guess = std::abs(x_hat(i)) > threshold;
    predicted += guess;
    tp += truth && guess;
    tn += !truth && !guess;
  }
  Metrics out;
  out.sparsity = predicted;
  out.acc = n ? static_cast<double>(tp + tn) / static_cast<double>(n) : 1.0;
  if (predicted == 0) {
    out.tpr = 1.0;
    out.tpr_undefined = true;
  } else {
    out.tpr = static_cast<double>(tp) / static_cast<double>(predicted);
  }
  const auto negatives = static_cast<std::size_t>(n) - predicted;
  if (negatives == 0) {
    out.tnr = 1.0;
    out.tnr_undefined = true;
  } else {
    out.tnr = static_cast<double>(tn) / static_cast<double>(negatives);
  }
  return out;
}

Metrics evaluate(const ProblemInstance& instance, const Vector& x_true, const Vector& x_hat, double threshold) {
  Metrics out = evaluate(x_true, x_hat, threshold);
  out.objective = objective(instance, x_hat, threshold);
  out.residual_sq = residual_sq(instance, x_hat);
  return out;
}

}  // namespace sparsecs
