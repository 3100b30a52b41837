#include <algorithm>
#include <cmath>

#include "sparsecs/bnb/bnb.hpp"

namespace sparsecs {

void NodePool::insert(Node node) {
  node.id = next_id_++;
  const auto key = std::make_pair(node.lower, node.id);
  nodes_.emplace(key, std::move(node));
}

double NodePool::min_lower() const {
  return nodes_.empty() ? std::numeric_limits<double>::infinity() : nodes_.begin()->first.first;
}

Node NodePool::pop() {
  if (nodes_.empty()) throw Error(ErrorCode::EmptyPool, "no open nodes");
  auto it = nodes_.begin();
  Node node = std::move(it->second);
  nodes_.erase(it);
  return node;
}

std::size_t NodePool::prune(double threshold) {
  const auto first = nodes_.lower_bound({threshold, 0});
  const auto removed = static_cast<std::size_t>(std::distance(first, nodes_.end()));
  nodes_.erase(first, nodes_.end());
  return removed;
}

Node select_node(NodePool& pool) { return pool.pop(); }

Index select_branch_index(const Node& node, const Vector& relaxation_z, double tie_tolerance) {
  const Index n = relaxation_z.size();
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  for (Index i : node.I0) fixed.at(static_cast<std::size_t>(i)) = true;
  for (Index i : node.I1) fixed.at(static_cast<std::size_t>(i)) = true;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) best = std::min(best, std::abs(relaxation_z(i) - 0.5));
  }
  if (best == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::CompletePattern, "every index is already fixed");
  }
  for (Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)] && std::abs(relaxation_z(i) - 0.5) <= best + tie_tolerance) return i;
  }
  return -1;  // unreachable
}

bool apply_cuts(const Node& node, const std::vector<FeasibilityCut>& cuts) {
  for (const FeasibilityCut& cut : cuts) {
    if (std::includes(node.I0.begin(), node.I0.end(), cut.zero_set.begin(), cut.zero_set.end())) return true;
  }
  return false;
}

}  // namespace sparsecs
