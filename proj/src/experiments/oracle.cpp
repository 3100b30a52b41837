#include "sparsecs/experiments/oracle.hpp"

#include <limits>

#include "sparsecs/core/ridge.hpp"

namespace sparsecs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<IndexSet> combinations(Index n, Index k) {
  std::vector<IndexSet> out;
  IndexSet current(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(current);
    Index pos = k - 1;
    while (pos >= 0 && current[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++current[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

// Returns +inf for supports that cannot meet the residual budget.
double score_support(const ProblemInstance& instance, const IndexSet& support, Vector* x_out) {
  if (support.empty()) {
    if (instance.b.squaredNorm() > instance.epsilon) return kInf;
    if (x_out) *x_out = Vector::Zero(instance.cols());
    return 0.0;
  }
  const Matrix As = instance.A(Eigen::all, support);
  const auto fit = min_weighted_norm_fit(As, instance.b, instance.epsilon, instance.weights(support));
  if (!fit) return kInf;
  if (x_out) *x_out = scatter(*fit, support, instance.cols());
  return static_cast<double>(support.size()) +
         (instance.weights(support).cwiseProduct(*fit)).squaredNorm() / instance.gamma;
}

void check_size(const ProblemInstance& instance, Index max_n) {
  validate(instance);
  if (instance.cols() > max_n) {
    throw Error(ErrorCode::ProblemTooLarge,
                "oracle enumeration limited to n <= " + std::to_string(max_n) + ", got " +
                    std::to_string(instance.cols()));
  }
  if (projection_residual_sq(instance.A, instance.b) > instance.epsilon) {
    throw Error(ErrorCode::InfeasibleInstance, "no support meets the residual budget");
  }
}

OracleResult finish(const ProblemInstance& instance, double best, const IndexSet& support) {
  if (!std::isfinite(best)) throw Error(ErrorCode::InfeasibleInstance, "no support meets the residual budget");
  OracleResult out;
  out.objective = score_support(instance, support, &out.x);
  out.support = support;
  return out;
}

template <bool Parallel>
OracleResult enumerate(const ProblemInstance& instance, Index max_n) {
  check_size(instance, max_n);
  const Index n = instance.cols();
  double best = kInf;
  IndexSet best_support;
  for (Index k = 0; k <= n && static_cast<double>(k) < best; ++k) {
    const std::vector<IndexSet> combos = combinations(n, k);
    const auto count = static_cast<std::ptrdiff_t>(combos.size());
    double level_best = kInf;
    std::ptrdiff_t level_index = -1;
    if constexpr (Parallel) {
#pragma omp parallel
      {
        double local_best = kInf;
        std::ptrdiff_t local_index = -1;
#pragma omp for schedule(dynamic, 16) nowait
        for (std::ptrdiff_t c = 0; c < count; ++c) {
          const double v = score_support(instance, combos[static_cast<std::size_t>(c)], nullptr);
          if (v < local_best) {
            local_best = v;
            local_index = c;
          }
        }
#pragma omp critical
        {
          if (local_best < level_best || (local_best == level_best && local_index < level_index)) {
            level_best = local_best;
            level_index = local_index;
          }
        }
      }
    } else {
      for (std::ptrdiff_t c = 0; c < count; ++c) {
        const double v = score_support(instance, combos[static_cast<std::size_t>(c)], nullptr);
        if (v < level_best) {
          level_best = v;
          level_index = c;
        }
      }
    }
    if (level_best < best) {
      best = level_best;
      best_support = combos[static_cast<std::size_t>(level_index)];
    }
  }
  return finish(instance, best, best_support);
}

}  // namespace

OracleResult brute_force_oracle(const ProblemInstance& instance, Index max_n) {
  return enumerate<true>(instance, max_n);
}

OracleResult brute_force_oracle_serial(const ProblemInstance& instance, Index max_n) {
  return enumerate<false>(instance, max_n);
}

}  // namespace sparsecs
