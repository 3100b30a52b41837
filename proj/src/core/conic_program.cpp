#include <cmath>
#include <cstdlib>
#include <sstream>

#include "sparsecs/core/conic.hpp"

namespace sparsecs {

ConicProgram::ConicProgram(Index num_variables)
    : objective(Vector::Zero(num_variables)),
      eq_matrix(0, num_variables),
      cone_matrix(0, num_variables) {}

Index ConicProgram::add_cone(ConeKind kind, Index dim) {
  const Cone cone{kind, dim};
  const Index first = cone_matrix.rows();
  const Index rows = cone.rows();
  cone_matrix.conservativeResize(first + rows, num_variables());
  cone_matrix.bottomRows(rows).setZero();
  cone_rhs.conservativeResize(first + rows);
  cone_rhs.tail(rows).setZero();
  cones.push_back(cone);
  return first;
}

void ConicProgram::set_lower(Index var, double value) {
  if (lower.size() == 0) lower = Vector::Constant(num_variables(), -std::numeric_limits<double>::infinity());
  lower(var) = value;
}

void ConicProgram::set_upper(Index var, double value) {
  if (upper.size() == 0) upper = Vector::Constant(num_variables(), std::numeric_limits<double>::infinity());
  upper(var) = value;
}

void ConicProgram::add_equality(const Vector& row, double rhs) {
  const Index r = eq_matrix.rows();
  eq_matrix.conservativeResize(r + 1, num_variables());
  eq_matrix.row(r) = row.transpose();
  eq_rhs.conservativeResize(r + 1);
  eq_rhs(r) = rhs;
}

void ConicProgram::validate() const {
  const Index n = num_variables();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidProgram, msg); };
  if (lower.size() != 0 && lower.size() != n) fail("lower bounds have the wrong length");
  if (upper.size() != 0 && upper.size() != n) fail("upper bounds have the wrong length");
  if (eq_matrix.cols() != n && eq_matrix.rows() != 0) fail("equality matrix has the wrong number of columns");
  if (eq_matrix.rows() != eq_rhs.size()) fail("equality rows and right-hand side disagree");
  if (cone_matrix.rows() != 0 && cone_matrix.cols() != n) fail("cone matrix has the wrong number of columns");
  if (cone_matrix.rows() != cone_rhs.size()) fail("cone rows and right-hand side disagree");
  Index rows = 0;
  for (const Cone& cone : cones) {
    if (cone.dim < 1) fail("cone dimensions must be positive");
    if (cone.kind == ConeKind::SecondOrder && cone.dim < 1) fail("second-order cone needs at least 1 row");
    if (cone.kind == ConeKind::RotatedSecondOrder && cone.dim < 2) fail("rotated cone needs at least 2 rows");
    rows += cone.rows();
  }
  if (rows != cone_matrix.rows()) {
    std::ostringstream msg;
    msg << "cones cover " << rows << " rows but the cone matrix has " << cone_matrix.rows();
    fail(msg.str());
  }
  if (!objective.allFinite() || !cone_matrix.allFinite() || !cone_rhs.allFinite() ||
      !eq_matrix.allFinite() || !eq_rhs.allFinite()) {
    fail("program data must be finite");
  }
  for (Index j = 0; j < n; ++j) {
    const double lo = lower.size() ? lower(j) : -std::numeric_limits<double>::infinity();
    const double hi = upper.size() ? upper(j) : std::numeric_limits<double>::infinity();
    if (std::isnan(lo) || std::isnan(hi)) fail("bounds must not be NaN");
  }
}

std::string_view to_string(SolveCode code) {
  switch (code) {
    case SolveCode::Optimal: return "Optimal";
    case SolveCode::Infeasible: return "Infeasible";
    case SolveCode::Unbounded: return "Unbounded";
    case SolveCode::NumericLimit: return "NumericLimit";
    case SolveCode::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

Index svec_size(Index order) { return order * (order + 1) / 2; }

Vector svec(const Matrix& symmetric) {
  const Index k = symmetric.rows();
  Vector out(svec_size(k));
  Index idx = 0;
  for (Index j = 0; j < k; ++j) {
    out(idx++) = symmetric(j, j);
    for (Index i = j + 1; i < k; ++i) out(idx++) = M_SQRT2 * symmetric(i, j);
  }
  return out;
}

Matrix smat(const Eigen::Ref<const Vector>& packed, Index order) {
  Matrix out(order, order);
  Index idx = 0;
  for (Index j = 0; j < order; ++j) {
    out(j, j) = packed(idx++);
    for (Index i = j + 1; i < order; ++i) {
      out(i, j) = out(j, i) = packed(idx++) * M_SQRT1_2;
    }
  }
  return out;
}

std::unique_ptr<ConicBackend> make_backend(std::string_view name) {
  std::string chosen(name);
  if (chosen.empty()) {
    if (const char* env = std::getenv("SPARSECS_SOLVER"); env != nullptr) chosen = env;
  }
  if (chosen.empty() || chosen == "ipm") return std::make_unique<InteriorPointBackend>();
  throw Error(ErrorCode::BackendFailure, "unknown conic backend \"" + chosen + "\"");
}

ConicSolution solve_conic(const ConicProgram& program, std::chrono::duration<double> time_limit) {
  ConicSettings settings;
  settings.time_limit = time_limit;
  return solve_conic(program, settings);
}

ConicSolution solve_conic(const ConicProgram& program, const ConicSettings& settings) {
  auto backend = make_backend();
  return backend->solve(program, settings);
}

}  // namespace sparsecs
