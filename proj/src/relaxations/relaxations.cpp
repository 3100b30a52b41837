#include "sparsecs/relaxations/relaxations.hpp"

#include <cmath>
#include <string>

namespace sparsecs {

namespace {

void require_feasible(const ProblemInstance& instance) {
  validate(instance);
  const double ls = projection_residual_sq(instance.A, instance.b);
  if (ls > instance.epsilon) {
    throw Error(ErrorCode::InfeasibleInstance,
                "least-squares residual " + std::to_string(ls) + " exceeds epsilon " +
                    std::to_string(instance.epsilon));
  }
}

void require_optimal(const ConicSolution& sol, const char* what) {
  if (!sol.status.optimal()) {
    throw Error(ErrorCode::BackendFailure,
                std::string(what) + ": conic solve ended with status " + std::string(to_string(sol.status.code)));
  }
}

// Appends (sqrt(eps), b - A x) in SOC, with x stored at `first_var` onwards.
void add_residual_cone(ConicProgram& program, const Matrix& A, const Vector& b, double epsilon, Index first_var) {
  const Index r = program.add_cone(ConeKind::SecondOrder, A.rows() + 1);
  program.cone_rhs(r) = std::sqrt(epsilon);
  program.cone_rhs.segment(r + 1, b.size()) = b;
  program.cone_matrix.block(r + 1, first_var, A.rows(), A.cols()) = A;
}

// Appends rows encoding |scale * x_j| <= t_k, i.e. t_k -+ scale x_j >= 0.
void add_abs_rows(ConicProgram& program, Index x_var, Index t_var, double scale) {
  const Index r = program.add_cone(ConeKind::NonNegative, 2);
  program.cone_matrix(r, x_var) = scale;
  program.cone_matrix(r, t_var) = -1.0;
  program.cone_matrix(r + 1, x_var) = -scale;
  program.cone_matrix(r + 1, t_var) = -1.0;
}

IndexSet sorted_unique(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

void check_pattern(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1) {
  const Index n = instance.cols();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index i : I0) {
    if (i < 0 || i >= n) throw Error(ErrorCode::DimensionMismatch, "index out of range in I0");
    seen[static_cast<std::size_t>(i)] = 1;
  }
  for (Index i : I1) {
    if (i < 0 || i >= n) throw Error(ErrorCode::DimensionMismatch, "index out of range in I1");
    if (seen[static_cast<std::size_t>(i)]) throw Error(ErrorCode::DimensionMismatch, "I0 and I1 overlap");
  }
}

void require_node_feasible(const ProblemInstance& instance, const IndexSet& I0) {
  const IndexSet open = complement(sorted_unique(I0), instance.cols());
  if (projection_residual_sq(instance.A, instance.b, open) > instance.epsilon) {
    throw Error(ErrorCode::NodeInfeasible, "no point with the forced zeros meets the residual budget");
  }
}

double lower_bound_of(const SolverStatus& status) {
  double lb = status.objective;
  if (std::isfinite(status.dual_objective)) lb = std::min(lb, status.dual_objective);
  return lb;
}

// Perspective relaxation with z fixed on I0 (to 0) and I1 (to 1); optional Big-M rows.
RelaxationSolution perspective_program(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                                       double big_m, const ConicSettings& settings) {
  const Index n = instance.cols();
  const double inv_gamma = 1.0 / instance.gamma;
  RelaxationSolution out;
  out.x = Vector::Zero(n);
  out.z = Vector::Zero(n);
  out.theta = Vector::Zero(n);

  std::vector<int> role(static_cast<std::size_t>(n), 0);  // 0 free, -1 zero, 1 one
  for (Index i : I0) role[static_cast<std::size_t>(i)] = -1;
  for (Index i : I1) role[static_cast<std::size_t>(i)] = 1;

  // Variables: x (n), z (n), theta (n).
  ConicProgram program(3 * n);
  for (Index i = 0; i < n; ++i) {
    program.objective(n + i) = 1.0;
    program.objective(2 * n + i) = inv_gamma * instance.weights(i) * instance.weights(i);
    const int r = role[static_cast<std::size_t>(i)];
    program.set_lower(n + i, r == 1 ? 1.0 : 0.0);
    program.set_upper(n + i, r == -1 ? 0.0 : 1.0);
    if (r == -1) {
      program.set_lower(i, 0.0);
      program.set_upper(i, 0.0);
    }
    if (instance.weights(i) == 0.0 || r == -1) {
      // Zero-weight coordinates cost nothing: the infimum drives z_i to 0.
      // Forced-zero coordinates have x_i = 0; theta_i is irrelevant.
      if (r != 1) program.set_upper(n + i, 0.0);
      program.set_lower(2 * n + i, 0.0);
      program.set_upper(2 * n + i, 0.0);
      continue;
    }
    // 2 * z_i * (theta_i / 2) >= x_i^2
    const Index row = program.add_cone(ConeKind::RotatedSecondOrder, 3);
    program.cone_matrix(row, n + i) = -1.0;
    program.cone_matrix(row + 1, 2 * n + i) = -0.5;
    program.cone_matrix(row + 2, i) = -1.0;
    if (std::isfinite(big_m)) {
      const Index b = program.add_cone(ConeKind::NonNegative, 2);
      // M z_i - w_i x_i >= 0 and M z_i + w_i x_i >= 0
      program.cone_matrix(b, n + i) = -big_m;
      program.cone_matrix(b, i) = instance.weights(i);
      program.cone_matrix(b + 1, n + i) = -big_m;
      program.cone_matrix(b + 1, i) = -instance.weights(i);
    }
  }
  add_residual_cone(program, instance.A, instance.b, instance.epsilon, 0);

  const ConicSolution sol = solve_conic(program, settings);
  out.status = sol.status;
  if (!sol.status.optimal()) return out;
  out.x = sol.x.head(n);
  out.z = sol.x.segment(n, n).cwiseMax(0.0).cwiseMin(1.0);
  out.theta = sol.x.tail(n).cwiseMax(0.0);
  out.objective = out.z.sum() + inv_gamma * instance.weights.array().square().matrix().dot(out.theta);
  return out;
}

}  // namespace

SolutionVector solve_weighted_bpd(const ProblemInstance& instance, const Vector& weights,
                                  const ConicSettings& settings) {
  require_feasible(instance);
  const Index n = instance.cols();
  if (weights.size() != n) throw Error(ErrorCode::DimensionMismatch, "weights length differs from n");
  if ((weights.array() < 0.0).any()) throw Error(ErrorCode::NegativeWeight, "weights must be nonnegative");
  if (!weights.allFinite()) throw Error(ErrorCode::NonFiniteData, "weights must be finite");
  if (instance.b.squaredNorm() <= instance.epsilon) return SolutionVector{Vector::Zero(n)};

  IndexSet costly;
  for (Index i = 0; i < n; ++i) {
    if (weights(i) > 0.0) costly.push_back(i);
  }
  const Index k = static_cast<Index>(costly.size());
  // Variables: x (n), t (k) with t >= |x| on the weighted coordinates.
  ConicProgram program(n + k);
  for (Index j = 0; j < k; ++j) {
    program.objective(n + j) = weights(costly[static_cast<std::size_t>(j)]);
    add_abs_rows(program, costly[static_cast<std::size_t>(j)], n + j, 1.0);
  }
  add_residual_cone(program, instance.A, instance.b, instance.epsilon, 0);
  const ConicSolution sol = solve_conic(program, settings);
  require_optimal(sol, "weighted BPD");
  return SolutionVector{sol.x.head(n)};
}

SolutionVector solve_bpd(const ProblemInstance& instance, const ConicSettings& settings) {
  return solve_weighted_bpd(instance, Vector::Ones(instance.cols()), settings);
}

RelaxationSolution solve_perspective_relaxation(const ProblemInstance& instance, const ConicSettings& settings) {
  return solve_bigm_relaxation(instance, std::numeric_limits<double>::infinity(), settings);
}

RelaxationSolution solve_bigm_relaxation(const ProblemInstance& instance, double big_m,
                                         const ConicSettings& settings) {
  if (!(big_m > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "M must be positive");
  require_feasible(instance);
  const Index n = instance.cols();
  if (instance.b.squaredNorm() <= instance.epsilon) {
    RelaxationSolution zero{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), 0.0, {}};
    zero.status.code = SolveCode::Optimal;
    zero.status.objective = zero.status.dual_objective = 0.0;
    zero.status.primal_residual = zero.status.dual_residual = zero.status.gap = 0.0;
    return zero;
  }
  RelaxationSolution sol = perspective_program(instance, {}, {}, big_m, settings);
  require_optimal(ConicSolution{Vector(), Vector(), Vector(), Vector(), sol.status}, "perspective relaxation");
  return sol;
}

NodeRelaxation solve_node_primal(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                                 const ConicSettings& settings) {
  validate(instance);
  check_pattern(instance, I0, I1);
  require_node_feasible(instance, I0);

  const Index n = instance.cols();
  const double sqrt_gamma = std::sqrt(instance.gamma);
  std::vector<int> role(static_cast<std::size_t>(n), 0);
  for (Index i : I0) role[static_cast<std::size_t>(i)] = -1;
  for (Index i : I1) role[static_cast<std::size_t>(i)] = 1;
  const double fixed_ones = static_cast<double>(sorted_unique(I1).size());

  NodeRelaxation out;
  out.z = Vector::Zero(n);
  for (Index i : I1) out.z(i) = 1.0;

  IndexSet open, ones, charged;  // columns in x; I1 members with w > 0; free members with w > 0
  for (Index i = 0; i < n; ++i) {
    const int r = role[static_cast<std::size_t>(i)];
    if (r == -1) continue;
    open.push_back(i);
    if (instance.weights(i) > 0.0) (r == 1 ? ones : charged).push_back(i);
  }

  if (instance.b.squaredNorm() <= instance.epsilon) {
    out.x = SolutionVector{Vector::Zero(n)};
    out.lower_bound = fixed_ones;
    out.status.code = SolveCode::Optimal;
    out.status.objective = out.status.dual_objective = fixed_ones;
    out.status.primal_residual = out.status.dual_residual = out.status.gap = 0.0;
    return out;
  }

  const Index k = static_cast<Index>(open.size());
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index j = 0; j < k; ++j) slot[static_cast<std::size_t>(open[static_cast<std::size_t>(j)])] = j;

  // Variables: x_open (k), t (charged), u (1 if any weighted ones).
  const Index nt = static_cast<Index>(charged.size());
  const bool has_quad = !ones.empty();
  ConicProgram program(k + nt + (has_quad ? 1 : 0));
  for (Index j = 0; j < nt; ++j) {
    const Index i = charged[static_cast<std::size_t>(j)];
    program.objective(k + j) = 2.0 * instance.weights(i) / sqrt_gamma;
    add_abs_rows(program, slot[static_cast<std::size_t>(i)], k + j, 1.0);
  }
  if (has_quad) {
    const Index u = k + nt;
    program.objective(u) = 1.0 / instance.gamma;
    // 2 * u * (1/2) >= ||W x_ones||^2
    const Index r = program.add_cone(ConeKind::RotatedSecondOrder, 2 + static_cast<Index>(ones.size()));
    program.cone_matrix(r, u) = -1.0;
    program.cone_rhs(r + 1) = 0.5;
    for (std::size_t j = 0; j < ones.size(); ++j) {
      program.cone_matrix(r + 2 + static_cast<Index>(j), slot[static_cast<std::size_t>(ones[j])]) =
          -instance.weights(ones[j]);
    }
  }
  add_residual_cone(program, instance.A(Eigen::all, open), instance.b, instance.epsilon, 0);

  const ConicSolution sol = solve_conic(program, settings);
  out.status = sol.status;
  out.x = SolutionVector{scatter(sol.status.optimal() ? Vector(sol.x.head(k)) : Vector::Zero(k), open, n)};
  if (sol.status.code == SolveCode::Infeasible) {
    throw Error(ErrorCode::NodeInfeasible, "conic solver reported the node infeasible");
  }
  if (!sol.status.optimal()) {
    out.lower_bound = fixed_ones;
    return out;
  }
  out.lower_bound = fixed_ones + lower_bound_of(sol.status);
  for (Index i = 0; i < n; ++i) {
    if (role[static_cast<std::size_t>(i)] != 0) continue;
    out.z(i) = std::min(1.0, instance.weights(i) * std::abs(out.x.x(i)) / sqrt_gamma);
  }
  return out;
}

NodeRelaxation solve_node_perspective(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                                      const ConicSettings& settings) {
  validate(instance);
  check_pattern(instance, I0, I1);
  require_node_feasible(instance, I0);
  const RelaxationSolution rel = perspective_program(instance, I0, I1, std::numeric_limits<double>::infinity(),
                                                     settings);
  NodeRelaxation out;
  out.status = rel.status;
  out.z = rel.z;
  out.x = SolutionVector{rel.x};
  const double fixed_ones = static_cast<double>(sorted_unique(I1).size());
  if (rel.status.code == SolveCode::Infeasible) {
    throw Error(ErrorCode::NodeInfeasible, "conic solver reported the node infeasible");
  }
  if (!rel.status.optimal()) {
    out.lower_bound = fixed_ones;
    out.z = Vector::Zero(instance.cols());
    for (Index i : I1) out.z(i) = 1.0;
    return out;
  }
  out.lower_bound = std::max(fixed_ones, lower_bound_of(rel.status));
  return out;
}

double node_dual_value(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1, const Vector& nu,
                       double tol) {
  validate(instance);
  check_pattern(instance, I0, I1);
  if (nu.size() != instance.rows()) throw Error(ErrorCode::DimensionMismatch, "nu must have length m");
  const Index n = instance.cols();
  std::vector<int> role(static_cast<std::size_t>(n), 0);
  for (Index i : I0) role[static_cast<std::size_t>(i)] = -1;
  for (Index i : I1) role[static_cast<std::size_t>(i)] = 1;
  const Vector corr = instance.A.transpose() * nu;
  const double limit_scale = 2.0 / std::sqrt(instance.gamma);
  double value = static_cast<double>(sorted_unique(I1).size()) + instance.b.dot(nu) -
                 std::sqrt(instance.epsilon) * nu.norm();
  for (Index i = 0; i < n; ++i) {
    const int r = role[static_cast<std::size_t>(i)];
    const double w = instance.weights(i);
    if (r == 0) {
      if (std::abs(corr(i)) > limit_scale * w + tol) return -std::numeric_limits<double>::infinity();
    } else if (r == 1) {
      if (w == 0.0) {
        if (std::abs(corr(i)) > tol) return -std::numeric_limits<double>::infinity();
      } else {
        value -= instance.gamma * corr(i) * corr(i) / (4.0 * w * w);
      }
    }
  }
  return value;
}

DualPoint solve_node_dual(const ProblemInstance& instance, const IndexSet& I0, const IndexSet& I1,
                          const ConicSettings& settings) {
  validate(instance);
  check_pattern(instance, I0, I1);
  const Index m = instance.rows();
  const Index n = instance.cols();
  std::vector<int> role(static_cast<std::size_t>(n), 0);
  for (Index i : I0) role[static_cast<std::size_t>(i)] = -1;
  for (Index i : I1) role[static_cast<std::size_t>(i)] = 1;
  const double limit_scale = 2.0 / std::sqrt(instance.gamma);

  IndexSet quad;
  for (Index i = 0; i < n; ++i) {
    if (role[static_cast<std::size_t>(i)] == 1 && instance.weights(i) > 0.0) quad.push_back(i);
  }
  // Variables: nu (m), q >= ||nu||, u >= sum gamma (A_i'nu)^2 / (4 w_i^2).
  const bool has_quad = !quad.empty();
  ConicProgram program(m + 1 + (has_quad ? 1 : 0));
  program.objective.head(m) = -instance.b;
  program.objective(m) = std::sqrt(instance.epsilon);
  {
    const Index r = program.add_cone(ConeKind::SecondOrder, m + 1);
    program.cone_matrix(r, m) = -1.0;
    program.cone_matrix.block(r + 1, 0, m, m) = -Matrix::Identity(m, m);
  }
  for (Index i = 0; i < n; ++i) {
    const int r = role[static_cast<std::size_t>(i)];
    const double w = instance.weights(i);
    if (r == 0) {
      // limit - A_i'nu >= 0 and limit + A_i'nu >= 0
      const Index row = program.add_cone(ConeKind::NonNegative, 2);
      program.cone_rhs(row) = program.cone_rhs(row + 1) = limit_scale * w;
      program.cone_matrix.block(row, 0, 1, m) = instance.A.col(i).transpose();
      program.cone_matrix.block(row + 1, 0, 1, m) = -instance.A.col(i).transpose();
    } else if (r == 1 && w == 0.0) {
      Vector row = Vector::Zero(program.num_variables());
      row.head(m) = instance.A.col(i);
      program.add_equality(row, 0.0);
    }
  }
  if (has_quad) {
    const Index u = m + 1;
    program.objective(u) = 1.0;
    const Index row = program.add_cone(ConeKind::RotatedSecondOrder, 2 + static_cast<Index>(quad.size()));
    program.cone_matrix(row, u) = -1.0;
    program.cone_rhs(row + 1) = 0.5;
    for (std::size_t j = 0; j < quad.size(); ++j) {
      const double scale = std::sqrt(instance.gamma) / (2.0 * instance.weights(quad[j]));
      program.cone_matrix.block(row + 2 + static_cast<Index>(j), 0, 1, m) =
          -scale * instance.A.col(quad[j]).transpose();
    }
  }

  DualPoint out{Vector::Zero(m), static_cast<double>(sorted_unique(I1).size())};
  const ConicSolution sol = solve_conic(program, settings);
  if (sol.status.optimal()) {
    Vector nu = sol.x.head(m);
    // Pull nu back inside the box constraints it may graze by solver tolerance.
    const Vector corr = instance.A.transpose() * nu;
    double ratio = 1.0;
    for (Index i = 0; i < n; ++i) {
      if (role[static_cast<std::size_t>(i)] == 0 && instance.weights(i) > 0.0) {
        ratio = std::max(ratio, std::abs(corr(i)) / (limit_scale * instance.weights(i)));
      }
    }
    nu /= ratio;
    const double value = node_dual_value(instance, I0, I1, nu);
    if (value > out.objective) out = DualPoint{nu, value};
  }
  return out;
}

}  // namespace sparsecs
