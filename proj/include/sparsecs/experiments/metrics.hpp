#pragma once

#include <chrono>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Support-recovery metrics of an estimate against the planted vector.
///   ACC = (TP + TN) / n,  TPR = TP / |I_hat|,  TNR = TN / (n - |I_hat|)
/// where I_hat is the estimate's support. An empty denominator gives 1.0 and
/// raises the matching *_undefined flag.
struct Metrics {
  std::size_t sparsity = 0;
  double acc = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  bool tpr_undefined = false;
  bool tnr_undefined = false;
  double objective = 0.0;
  double residual_sq = 0.0;
  std::chrono::duration<double> runtime{0.0};
};

Metrics evaluate(const Vector& x_true, const Vector& x_hat, double threshold = kDefaultSupportThreshold);

/// Also fills objective and residual_sq for the given instance.
Metrics evaluate(const ProblemInstance& instance, const Vector& x_true, const Vector& x_hat,
                 double threshold = kDefaultSupportThreshold);

}  // namespace sparsecs
