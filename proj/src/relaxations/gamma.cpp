#include <cmath>
#include <limits>

#include "sparsecs/relaxations/relaxations.hpp"

namespace sparsecs {

namespace {

struct ThinSvd {
  Matrix U;
  Vector sigma;
  Matrix V;
};

ThinSvd thin_svd(const Matrix& A) {
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const double tol = std::max(A.rows(), A.cols()) * std::numeric_limits<double>::epsilon() *
                     (s.size() ? s(0) : 0.0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  return {svd.matrixU().leftCols(rank), s.head(rank), svd.matrixV().leftCols(rank)};
}

}  // namespace

double compute_gamma0(const ProblemInstance& instance) {
  validate(instance);
  const ThinSvd svd = thin_svd(instance.A);
  const Vector center = svd.U.transpose() * instance.b;  // A x = U p, ||p - center|| <= radius
  const double radius_sq = instance.epsilon - (instance.b.squaredNorm() - center.squaredNorm());
  if (radius_sq < 0.0) throw Error(ErrorCode::InfeasibleInstance, "residual set is empty");
  const double radius = std::sqrt(radius_sq);

  double gamma0 = 0.0;
  for (Index i = 0; i < instance.cols(); ++i) {
    const double w = instance.weights(i);
    if (w == 0.0) continue;
    const double in_row_space = svd.V.row(i).squaredNorm();
    // e_i outside the row space of A means x_i moves freely along the null space.
    if (1.0 - in_row_space > 1e-10) return std::numeric_limits<double>::infinity();
    // w x_i = g'p with g = w Sigma^{-1} V' e_i.
    const Vector g = w * svd.V.row(i).transpose().cwiseQuotient(svd.sigma);
    const double reach = std::abs(g.dot(center)) + g.norm() * radius;
    gamma0 = std::max(gamma0, reach * reach);
  }
  return gamma0;
}

double compute_gamma0_conic(const ProblemInstance& instance, const ConicSettings& settings) {
  validate(instance);
  if (projection_residual_sq(instance.A, instance.b) > instance.epsilon) {
    throw Error(ErrorCode::InfeasibleInstance, "residual set is empty");
  }
  const Index m = instance.rows();
  const Index n = instance.cols();
  ConicProgram program(n);
  const Index r = program.add_cone(ConeKind::SecondOrder, m + 1);
  program.cone_rhs(r) = std::sqrt(instance.epsilon);
  program.cone_rhs.segment(r + 1, m) = instance.b;
  program.cone_matrix.block(r + 1, 0, m, n) = instance.A;

  double gamma0 = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (instance.weights(i) == 0.0) continue;
    for (double sign : {1.0, -1.0}) {
      program.objective.setZero();
      program.objective(i) = -sign * instance.weights(i);
      const ConicSolution sol = solve_conic(program, settings);
      if (sol.status.code == SolveCode::Unbounded) return std::numeric_limits<double>::infinity();
      if (!sol.status.optimal()) {
        throw Error(ErrorCode::BackendFailure, "coordinate maximization did not converge");
      }
      const double reach = -sol.status.objective;
      gamma0 = std::max(gamma0, reach * reach);
    }
  }
  return gamma0;
}

RidgePathPoint ridge_path_point(const ProblemInstance& instance) {
  validate(instance);
  if (instance.b.squaredNorm() <= instance.epsilon) {
    throw Error(ErrorCode::DegenerateInstance, "||b||^2 <= epsilon: zero is feasible");
  }
  const ThinSvd svd = thin_svd(instance.A);
  const Vector proj = svd.U.transpose() * instance.b;
  const double outside = std::max(0.0, instance.b.squaredNorm() - proj.squaredNorm());
  if (outside > instance.epsilon) throw Error(ErrorCode::InfeasibleInstance, "residual set is empty");

  // x(lambda) = V diag(s / (1/lambda + s^2)) U'b; the residual decreases in lambda.
  auto point = [&](double lambda) {
    Vector coef(svd.sigma.size());
    for (Index i = 0; i < coef.size(); ++i) {
      const double s = svd.sigma(i);
      coef(i) = s / (1.0 / lambda + s * s) * proj(i);
    }
    return Vector(svd.V * coef);
  };
  auto residual = [&](double lambda) {
    double r = outside;
    for (Index i = 0; i < proj.size(); ++i) {
      const double f = 1.0 / (1.0 + lambda * svd.sigma(i) * svd.sigma(i));
      r += f * f * proj(i) * proj(i);
    }
    return r;
  };

  double lo = std::log(1e-10);
  double hi = std::log(1e10);
  double lambda = std::exp(hi);
  double res = residual(lambda);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    lambda = std::exp(mid);
    res = residual(lambda);
    if (std::abs(res - instance.epsilon) <= 1e-8) break;
    (res > instance.epsilon ? lo : hi) = mid;
  }
  return {point(lambda), lambda, res};
}

double regularization_gap_bound(const ProblemInstance& instance, double min_norm_sq) {
  const RidgePathPoint ridge = ridge_path_point(instance);
  return (min_norm_sq - ridge.x.squaredNorm()) / instance.gamma;
}

}  // namespace sparsecs
