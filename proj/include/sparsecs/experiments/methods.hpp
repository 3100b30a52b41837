#pragma once

#include <atomic>
#include <chrono>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Methods runnable by name: bnb, omp, bpd, irwl1 (the last two greedily
/// rounded), bpd-raw, irwl1-raw (unrounded), soc-bound, sos-bound.
const std::vector<std::string>& method_names();
bool is_known_method(const std::string& name);

struct MethodOptions {
  std::chrono::duration<double> time_limit{std::numeric_limits<double>::infinity()};
  double delta = 0.0;
  bool strict_bounds = false;
  bool backbone = false;
  std::size_t log_every = 0;
  std::ostream* log = nullptr;
  const std::atomic<bool>* cancel = nullptr;  // checked between B&B expansions
};

struct MethodRun {
  std::string method;
  std::optional<Vector> x;  // absent for bound-only methods and failures
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> lower_bound;
  std::optional<double> gap;
  std::string status;  // "Optimal-heuristic", a B&B or solver status, or "Error:<code>"
  bool infeasible = false;
  std::chrono::duration<double> runtime{0.0};
  std::optional<std::size_t> nodes;
};

/// Runs a method; library errors become an "Error:<code>" status (or
/// infeasible = true) instead of propagating. Unknown names throw.
MethodRun run_method(const std::string& method, const ProblemInstance& instance, const MethodOptions& options = {});

}  // namespace sparsecs
