#pragma once

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

struct OracleResult {
  Vector x;
  double objective = 0.0;  // |S| + (1/gamma) ||W x_S||^2 for the optimal support S
  IndexSet support;
};

/// Global optimum of  min ||x||_0 + (1/gamma)||W x||^2  s.t. ||Ax - b||^2 <= eps
/// by enumerating supports in increasing cardinality. Each feasible support is
/// scored with its minimum-weighted-norm fit; enumeration stops once the
/// cardinality alone reaches the best value. Ties go to the smaller support,
/// then the lexicographically first. Supports of one cardinality are scored in
/// parallel with OpenMP.
///
/// Throws ProblemTooLarge when n > max_n and InfeasibleInstance when no support
/// (not even all n columns) meets the residual budget.
OracleResult brute_force_oracle(const ProblemInstance& instance, Index max_n = 15);

/// Single-threaded reference with identical results.
OracleResult brute_force_oracle_serial(const ProblemInstance& instance, Index max_n = 15);

}  // namespace sparsecs
