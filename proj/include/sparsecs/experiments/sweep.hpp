#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsecs/experiments/methods.hpp"
#include "sparsecs/experiments/metrics.hpp"

namespace sparsecs {

inline constexpr int kSchemaVersion = 1;

struct SweepGrid {
  std::vector<Index> n;
  std::vector<Index> m;
  std::vector<Index> k;
  std::vector<double> alpha;
  std::vector<std::optional<double>> gamma{std::nullopt};  // nullopt: sqrt(n)
  std::vector<std::uint64_t> seeds;
  double sigma = 10.0;
};

struct SweepConfig {
  SweepGrid grid;
  std::vector<std::string> methods;
  std::map<std::string, std::chrono::duration<double>> time_budget;  // per method, default unlimited
  double delta = 0.0;
  int jobs = 1;
  const std::atomic<bool>* cancel = nullptr;  // stop starting new rows; B&B stops at its next expansion
};

struct SweepRow {
  std::string method;
  Index n = 0, m = 0, k = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  bool has_solution = false;  // false for bound-only methods and failures
  Metrics metrics;            // objective holds the bound for bound-only methods
  std::string status;
};

/// Generates every (n, m, k, alpha, gamma, seed) instance and runs each method
/// on it. Instances run in parallel (up to `jobs`); rows are delivered to
/// `on_row` in grid order, each as soon as all earlier ones are done. Returns
/// the rows completed before any cancellation.
std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const std::function<void(const SweepRow&)>& on_row = {});

/// CSV with a leading "# schema_version: N" comment line and the header
///   method,n,m,k,alpha,gamma,seed,sparsity,acc,tpr,tnr,objective,residual_sq,runtime_ms,status
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRow& row);

struct SweepSummary {
  std::string method;
  Index n = 0, m = 0, k = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t rows = 0;       // all rows of the group
  std::size_t solved = 0;     // rows with a solution
  double sparsity = 0.0;      // means over solved rows
  double acc = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double objective = 0.0;     // mean over rows with a finite objective
  double runtime_ms = 0.0;    // mean over all rows
};

/// Means per (method, grid point), in first-appearance order.
std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

}  // namespace sparsecs
