#pragma once

#include <chrono>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

enum class ConeKind {
  NonNegative,          // s_i >= 0
  SecondOrder,          // s_0 >= ||s_{1:}||
  RotatedSecondOrder,   // 2 s_0 s_1 >= ||s_{2:}||^2,  s_0, s_1 >= 0
  PositiveSemidefinite  // svec(S) with S >= 0; dim is the matrix order
};

struct Cone {
  ConeKind kind;
  Index dim;

  /// Number of slack rows the cone occupies.
  Index rows() const { return kind == ConeKind::PositiveSemidefinite ? dim * (dim + 1) / 2 : dim; }
};

/// Backend-neutral conic program
///
///   minimize    c'x
///   subject to  E x = f
///               h - G x  in  K_1 x ... x K_p     (cones stacked in order)
///               lower <= x <= upper              (entries may be +-inf)
///
/// PSD blocks use the scaled lower-triangular column-major svec layout
/// (off-diagonal entries multiplied by sqrt(2)).
struct ConicProgram {
  Vector objective;
  Vector lower;  // empty means -inf everywhere
  Vector upper;  // empty means +inf everywhere
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix cone_matrix;
  Vector cone_rhs;
  std::vector<Cone> cones;

  explicit ConicProgram(Index num_variables = 0);

  Index num_variables() const { return objective.size(); }
  Index num_cone_rows() const { return cone_matrix.rows(); }

  /// Appends a cone block; returns the first row index of the block.
  Index add_cone(ConeKind kind, Index dim);
  void set_lower(Index var, double value);
  void set_upper(Index var, double value);
  void add_equality(const Vector& row, double rhs);

  /// Throws Error(InvalidProgram) when shapes and cone sizes disagree.
  void validate() const;
};

enum class SolveCode { Optimal, Infeasible, Unbounded, NumericLimit, TimeLimit };

std::string_view to_string(SolveCode code);

struct SolverStatus {
  SolveCode code = SolveCode::NumericLimit;
  double objective = std::numeric_limits<double>::quiet_NaN();       // primal, meaningful when Optimal
  double dual_objective = std::numeric_limits<double>::quiet_NaN();  // dual estimate at the same iterate
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;

  bool optimal() const { return code == SolveCode::Optimal; }
};

struct ConicSolution {
  Vector x;
  Vector slack;      // h - G x
  Vector cone_dual;  // multipliers of the cone rows
  Vector eq_dual;
  SolverStatus status;
};

struct ConicSettings {
  double feasibility_tol = 1e-8;  // requested
  double gap_tol = 1e-8;          // requested (absolute and relative)
  double accepted_tol = 1e-6;     // a stalled run within this is still reported Optimal
  int max_iterations = 120;
  bool verbose = false;  // one line per iteration on stderr
  std::chrono::duration<double> time_limit{std::numeric_limits<double>::infinity()};
};

/// Pluggable conic solver. One in-flight solve per backend object.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const ConicProgram& program, const ConicSettings& settings) = 0;
};

/// Dense homogeneous-embedding primal-dual interior point method with
/// Nesterov-Todd scaling.
class InteriorPointBackend final : public ConicBackend {
 public:
  std::string name() const override { return "ipm"; }
  ConicSolution solve(const ConicProgram& program, const ConicSettings& settings) override;
};

/// Backend by name; an empty name consults SPARSECS_SOLVER and falls back to "ipm".
std::unique_ptr<ConicBackend> make_backend(std::string_view name = {});

ConicSolution solve_conic(const ConicProgram& program,
                          std::chrono::duration<double> time_limit =
                              std::chrono::duration<double>(std::numeric_limits<double>::infinity()));
ConicSolution solve_conic(const ConicProgram& program, const ConicSettings& settings);

/// svec helpers for PSD blocks.
Index svec_size(Index order);
Vector svec(const Matrix& symmetric);
Matrix smat(const Eigen::Ref<const Vector>& packed, Index order);

}  // namespace sparsecs
