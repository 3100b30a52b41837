#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecs/core/conic.hpp"
#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Partial sparsity pattern: x_{I0} = 0, z_{I1} = 1.
struct Node {
  IndexSet I0;  // sorted
  IndexSet I1;  // sorted
  double lower = 0.0;
  Vector relaxation_z;
  std::uint64_t id = 0;  // insertion order, assigned by the pool
  std::size_t depth = 0;

  std::size_t fixed() const { return I0.size() + I1.size(); }
};

/// Excludes every pattern whose zero set contains zero_set.
struct FeasibilityCut {
  IndexSet zero_set;  // sorted
};

/// Open nodes ordered by lower bound, then insertion.
class NodePool {
 public:
  /// Assigns the node's id and stores it.
  void insert(Node node);
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  /// Lowest bound in the pool, +infinity when empty.
  double min_lower() const;
  /// Removes and returns the first node of least lower bound. Throws EmptyPool.
  Node pop();
  /// Drops every node with lower >= threshold; returns how many.
  std::size_t prune(double threshold);

 private:
  std::map<std::pair<double, std::uint64_t>, Node> nodes_;
  std::uint64_t next_id_ = 0;
};

Node select_node(NodePool& pool);

/// Free index minimizing |z_i - 0.5|. Distances within `tie_tolerance` of the
/// best count as ties and go to the lowest index. Throws CompletePattern.
Index select_branch_index(const Node& node, const Vector& relaxation_z, double tie_tolerance = 1e-9);

/// True iff node.I0 contains the zero set of some cut.
bool apply_cuts(const Node& node, const std::vector<FeasibilityCut>& cuts);

/// Indices with |x_i| >= threshold in the BPD solution. Throws InfeasibleInstance.
IndexSet compute_backbone(const ProblemInstance& instance, double threshold = 1e-6,
                          const ConicSettings& settings = {});

enum class BnBStatus { OptimalWithinDelta, TimeLimit, Infeasible, TrivialZero };

std::string_view to_string(BnBStatus status);

struct BnBProgress {
  std::size_t nodes = 0;
  std::size_t open = 0;
  std::size_t cuts = 0;
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  double elapsed = 0.0;  // seconds
  const Vector* x_best = nullptr;
};

struct BnBConfig {
  double delta = 0.0;
  std::chrono::duration<double> time_limit{std::numeric_limits<double>::infinity()};
  std::optional<IndexSet> backbone;
  bool strict_bounds = false;          // perspective node program instead of the eliminated one
  double fractional_tolerance = 1e-9;  // |z_i - 0.5| differences below this are branching ties
  double prune_tolerance = 1e-9;       // nodes with lower >= upper - this are discarded
  bool parallel_children = true;       // solve the two children of an expansion concurrently
  std::size_t log_every = 0;           // progress line every N expanded nodes (0: never)
  std::ostream* log = nullptr;         // progress lines and warnings
  /// Called after every expansion; returning false stops the search (reported as TimeLimit).
  std::function<bool(const BnBProgress&)> observer;
  ConicSettings conic;
};

struct BnBResult {
  Vector x_best;
  double upper = std::numeric_limits<double>::infinity();
  double lower = 0.0;
  double gap = std::numeric_limits<double>::infinity();  // (upper - lower) / upper, 0 when upper = 0
  std::size_t nodes_explored = 0;
  std::size_t cuts_added = 0;
  BnBStatus status = BnBStatus::Infeasible;
  std::vector<std::string> warnings;
};

/// Branch and bound for  min ||x||_0 + (1/gamma)||W x||^2  s.t. ||Ax - b||^2 <= eps.
BnBResult solve(const ProblemInstance& instance, const BnBConfig& config = {});

/// (upper - lower) / upper with 0 for upper = 0.
double relative_gap(double upper, double lower);

}  // namespace sparsecs
