#include "sparsecs/core/ridge.hpp"

#include <cmath>

namespace sparsecs {

namespace {

// min ||y||^2 s.t. ||B y - c||^2 <= epsilon, given ||c||^2 > epsilon.
std::optional<Vector> unit_ridge(const Matrix& B, const Vector& c, double epsilon) {
  if (B.cols() == 0) return std::nullopt;
  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sigma = svd.singularValues();
  const double tol = std::max(B.rows(), B.cols()) * std::numeric_limits<double>::epsilon() *
                     (sigma.size() ? sigma(0) : 0.0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol) ++rank;
  const Matrix U = svd.matrixU().leftCols(rank);
  const Matrix V = svd.matrixV().leftCols(rank);
  const Vector s = sigma.head(rank);
  const Vector proj = U.transpose() * c;
  const double outside = std::max(0.0, c.squaredNorm() - proj.squaredNorm());
  if (outside > epsilon) return std::nullopt;

  // residual(mu) = sum (mu / (s^2 + mu))^2 proj^2 + outside, increasing in mu.
  auto residual = [&](double mu) {
    double r = outside;
    for (Index i = 0; i < rank; ++i) {
      const double f = mu / (s(i) * s(i) + mu);
      r += f * f * proj(i) * proj(i);
    }
    return r;
  };
  double lo = 0.0;
  double hi = rank ? s(0) * s(0) : 1.0;
  while (residual(hi) <= epsilon) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) <= epsilon ? lo : hi) = mid;
  }
  Vector coef(rank);
  for (Index i = 0; i < rank; ++i) coef(i) = s(i) / (s(i) * s(i) + lo) * proj(i);
  return Vector(V * coef);
}

}  // namespace

std::optional<Vector> min_weighted_norm_fit(const Matrix& A, const Vector& b, double epsilon,
                                            const Vector& weights) {
  const Index n = A.cols();
  IndexSet free_cols, costly;
  for (Index j = 0; j < n; ++j) (weights(j) > 0.0 ? costly : free_cols).push_back(j);

  // Project the zero-weight columns out of the problem.
  Matrix Q;  // orthonormal basis of span(A_free)
  if (!free_cols.empty()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A(Eigen::all, free_cols));
    Q = qr.householderQ() * Matrix::Identity(A.rows(), qr.rank());
  } else {
    Q.resize(A.rows(), 0);
  }
  auto deflate = [&](const Matrix& M) -> Matrix { return M - Q * (Q.transpose() * M); };
  const Vector c = deflate(b);

  Vector x = Vector::Zero(n);
  if (c.squaredNorm() > epsilon) {
    Matrix B = deflate(A(Eigen::all, costly));
    for (std::size_t j = 0; j < costly.size(); ++j) B.col(static_cast<Index>(j)) /= weights(costly[j]);
    const auto y = unit_ridge(B, c, epsilon);
    if (!y) return std::nullopt;
    for (std::size_t j = 0; j < costly.size(); ++j) {
      x(costly[j]) = (*y)(static_cast<Index>(j)) / weights(costly[j]);
    }
  }
  if (!free_cols.empty()) {
    const Vector rest = b - A * x;
    const Vector fit = A(Eigen::all, free_cols).completeOrthogonalDecomposition().solve(rest);
    for (std::size_t j = 0; j < free_cols.size(); ++j) x(free_cols[j]) = fit(static_cast<Index>(j));
  }
  return x;
}

std::optional<Vector> min_norm_fit(const Matrix& A, const Vector& b, double epsilon) {
  return min_weighted_norm_fit(A, b, epsilon, Vector::Ones(A.cols()));
}

}  // namespace sparsecs
