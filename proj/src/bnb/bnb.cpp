#include "sparsecs/bnb/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "sparsecs/core/ridge.hpp"
#include "sparsecs/relaxations/relaxations.hpp"
#include "sparsecs/rounding/rounding.hpp"

namespace sparsecs {

namespace {

using Clock = std::chrono::steady_clock;

struct Candidate {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
};

// Best value of |S| + (1/gamma)||W x||^2 over x supported on S.
Candidate polish(const ProblemInstance& instance, const IndexSet& support) {
  Candidate out;
  const Index n = instance.cols();
  if (support.empty()) {
    if (instance.b.squaredNorm() <= instance.epsilon) out = {Vector::Zero(n), 0.0};
    return out;
  }
  const Vector w = instance.weights(support);
  const auto fit = min_weighted_norm_fit(instance.A(Eigen::all, support), instance.b, instance.epsilon, w);
  if (!fit) return out;
  out.x = scatter(*fit, support, n);
  out.value = static_cast<double>(support.size()) + w.cwiseProduct(*fit).squaredNorm() / instance.gamma;
  return out;
}

struct ChildEval {
  Node node;
  bool cut_before = false;  // violates an existing cut; not solved
  bool infeasible = false;
  Candidate candidate;
};

class Search {
 public:
  Search(const ProblemInstance& instance, const BnBConfig& config)
      : instance_(instance), config_(config), start_(Clock::now()) {}

  BnBResult run();

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool out_of_time() const { return elapsed() >= config_.time_limit.count(); }
  ConicSettings node_settings() const;
  NodeRelaxation relax(const IndexSet& I0, const IndexSet& I1) const;
  void evaluate(ChildEval& child) const;
  void offer(const Candidate& candidate);
  BnBProgress progress() const;
  void log_progress() const;

  const ProblemInstance& instance_;
  const BnBConfig& config_;
  Clock::time_point start_;
  BnBResult result_;
  NodePool pool_;
  std::vector<FeasibilityCut> cuts_;
};

ConicSettings Search::node_settings() const {
  ConicSettings s = config_.conic;
  const double left = config_.time_limit.count() - elapsed();
  if (std::isfinite(left)) s.time_limit = std::chrono::duration<double>(std::max(left, 0.0));
  return s;
}

NodeRelaxation Search::relax(const IndexSet& I0, const IndexSet& I1) const {
  return config_.strict_bounds ? solve_node_perspective(instance_, I0, I1, node_settings())
                               : solve_node_primal(instance_, I0, I1, node_settings());
}

void Search::evaluate(ChildEval& child) const {
  NodeRelaxation rel;
  try {
    rel = relax(child.node.I0, child.node.I1);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NodeInfeasible) throw;
    child.infeasible = true;
    return;
  }
  // A child's completions are a subset of its parent's, so the parent's bound still holds.
  child.node.lower = std::max(child.node.lower, rel.lower_bound);
  child.node.relaxation_z = rel.z;

  Candidate best;
  auto consider = [&](const IndexSet& support) {
    Candidate c = polish(instance_, support);
    if (c.value < best.value) best = std::move(c);
  };
  consider(greedy_round(instance_, rel.x.x).support());
  // The relaxation's own support, with forced ones kept, when it is already feasible.
  IndexSet own = rel.x.support();
  IndexSet merged;
  std::set_union(own.begin(), own.end(), child.node.I1.begin(), child.node.I1.end(), std::back_inserter(merged));
  if (projection_residual_sq(instance_.A, instance_.b, merged) <= instance_.epsilon) consider(merged);
  child.candidate = std::move(best);
}

void Search::offer(const Candidate& candidate) {
  if (!(candidate.value < result_.upper)) return;
  result_.upper = candidate.value;
  result_.x_best = candidate.x;
  pool_.prune(result_.upper - config_.prune_tolerance);
}

BnBProgress Search::progress() const {
  BnBProgress p;
  p.nodes = result_.nodes_explored;
  p.open = pool_.size();
  p.cuts = result_.cuts_added;
  p.upper = result_.upper;
  p.lower = result_.lower;
  p.gap = result_.gap;
  p.elapsed = elapsed();
  p.x_best = &result_.x_best;
  return p;
}

void Search::log_progress() const {
  if (config_.log == nullptr) return;
  const BnBProgress p = progress();
  std::ostringstream line;
  line << "bnb nodes=" << p.nodes << " open=" << p.open << " cuts=" << p.cuts << " upper=" << p.upper
       << " lower=" << p.lower << " gap=" << p.gap << " elapsed=" << p.elapsed << '\n';
  *config_.log << line.str() << std::flush;
}

BnBResult Search::run() {
  const Index n = instance_.cols();
  result_.x_best = Vector::Zero(n);
  if (projection_residual_sq(instance_.A, instance_.b) > instance_.epsilon) {
    result_.status = BnBStatus::Infeasible;
    result_.upper = std::numeric_limits<double>::infinity();
    return result_;
  }
  if (instance_.b.squaredNorm() <= instance_.epsilon) {
    result_.status = BnBStatus::TrivialZero;
    result_.upper = result_.lower = result_.gap = 0.0;
    return result_;
  }

  if (!config_.strict_bounds) {
    const double gamma0 = compute_gamma0(instance_);
    if (instance_.gamma < gamma0) {
      std::ostringstream msg;
      msg << "gamma " << instance_.gamma << " is below gamma0 " << gamma0
          << "; the eliminated node bound may be weaker than the perspective bound";
      result_.warnings.push_back(msg.str());
      if (config_.log != nullptr) *config_.log << "warning: " << msg.str() << '\n';
    }
  }

  ChildEval root;
  evaluate(root);
  if (root.infeasible) {  // cannot happen past the guard, but keep the statuses honest
    result_.status = BnBStatus::Infeasible;
    return result_;
  }
  offer(root.candidate);
  result_.lower = std::min(root.node.lower, result_.upper);
  result_.gap = relative_gap(result_.upper, result_.lower);
  if (root.node.lower < result_.upper - config_.prune_tolerance) pool_.insert(std::move(root.node));

  while (!pool_.empty() && result_.gap > config_.delta) {
    if (out_of_time()) break;
    Node parent = select_node(pool_);
    if (parent.fixed() == static_cast<std::size_t>(n)) continue;  // leaf: its bound is exact
    const Index i = select_branch_index(parent, parent.relaxation_z, config_.fractional_tolerance);
    ++result_.nodes_explored;

    ChildEval children[2];
    for (int k = 0; k < 2; ++k) {
      Node& c = children[k].node;
      c.I0 = parent.I0;
      c.I1 = parent.I1;
      IndexSet& grow = k == 0 ? c.I0 : c.I1;
      grow.insert(std::upper_bound(grow.begin(), grow.end(), i), i);
      c.lower = parent.lower;
      c.depth = parent.depth + 1;
      children[k].cut_before = apply_cuts(c, cuts_);
    }
#pragma omp parallel for num_threads(2) schedule(static, 1) if (config_.parallel_children)
    for (int k = 0; k < 2; ++k) {
      if (!children[k].cut_before) evaluate(children[k]);
    }
    for (ChildEval& child : children) {
      if (child.cut_before) continue;
      if (child.infeasible) {
        cuts_.push_back(FeasibilityCut{child.node.I0});
        ++result_.cuts_added;
        continue;
      }
      offer(child.candidate);
      if (child.node.lower < result_.upper - config_.prune_tolerance) pool_.insert(std::move(child.node));
    }

    // Never report a weaker bound than before; both are valid.
    result_.lower = std::max(result_.lower, std::min(pool_.min_lower(), result_.upper));
    result_.gap = relative_gap(result_.upper, result_.lower);
    if (config_.log_every > 0 && result_.nodes_explored % config_.log_every == 0) log_progress();
    if (config_.observer && !config_.observer(progress())) break;
  }

  if (pool_.empty()) {
    result_.lower = result_.upper;
    result_.gap = 0.0;
  }
  result_.status = result_.gap <= config_.delta ? BnBStatus::OptimalWithinDelta : BnBStatus::TimeLimit;
  if (config_.log_every > 0) log_progress();
  return result_;
}

}  // namespace

std::string_view to_string(BnBStatus status) {
  switch (status) {
    case BnBStatus::OptimalWithinDelta: return "OptimalWithinDelta";
    case BnBStatus::TimeLimit: return "TimeLimit";
    case BnBStatus::Infeasible: return "Infeasible";
    case BnBStatus::TrivialZero: return "TrivialZero";
  }
  return "Unknown";
}

double relative_gap(double upper, double lower) {
  if (upper == 0.0) return 0.0;
  return (upper - lower) / upper;
}

IndexSet compute_backbone(const ProblemInstance& instance, double threshold, const ConicSettings& settings) {
  const SolutionVector x = solve_bpd(instance, settings);
  IndexSet out;
  for (Index i = 0; i < x.x.size(); ++i) {
    if (std::abs(x.x(i)) >= threshold) out.push_back(i);
  }
  return out;
}

BnBResult solve(const ProblemInstance& instance, const BnBConfig& config) {
  validate(instance);
  if (!(config.delta >= 0.0)) throw Error(ErrorCode::NonPositiveParameter, "delta must be nonnegative");
  if (!config.backbone) return Search(instance, config).run();

  IndexSet columns = *config.backbone;
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  for (Index i : columns) {
    if (i < 0 || i >= instance.cols()) throw Error(ErrorCode::DimensionMismatch, "backbone index out of range");
  }
  const ProblemInstance reduced = instance.restrict_columns(columns);
  BnBResult out = Search(reduced, config).run();
  out.x_best = scatter(out.x_best, columns, instance.cols());
  return out;
}

}  // namespace sparsecs
