#include "sparsecs/core/problem.hpp"

#include <cmath>
#include <sstream>

namespace sparsecs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::InfeasibleInstance: return "InfeasibleInstance";
    case ErrorCode::NodeInfeasible: return "NodeInfeasible";
    case ErrorCode::DegenerateInstance: return "DegenerateInstance";
    case ErrorCode::NoFeasibleCompletion: return "NoFeasibleCompletion";
    case ErrorCode::SingularSchurComplement: return "SingularSchurComplement";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::CompletePattern: return "CompletePattern";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

ProblemInstance ProblemInstance::make(Matrix A, Vector b, double epsilon,
                                      std::optional<double> gamma,
                                      std::optional<Vector> weights) {
  ProblemInstance instance;
  const Index n = A.cols();
  instance.A = std::move(A);
  instance.b = std::move(b);
  instance.epsilon = epsilon;
  instance.gamma = gamma.value_or(std::sqrt(static_cast<double>(n)));
  instance.weights = weights ? std::move(*weights) : Vector::Ones(n);
  return instance;
}

ProblemInstance ProblemInstance::restrict_columns(const IndexSet& columns) const {
  ProblemInstance out;
  out.A.resize(A.rows(), static_cast<Index>(columns.size()));
  out.weights.resize(static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    out.A.col(static_cast<Index>(k)) = A.col(columns[k]);
    out.weights(static_cast<Index>(k)) = weights(columns[k]);
  }
  out.b = b;
  out.epsilon = epsilon;
  out.gamma = gamma;
  return out;
}

std::size_t SolutionVector::sparsity() const { return count_support(x, support_threshold); }

IndexSet SolutionVector::support() const { return support_of(x, support_threshold); }

void validate(const ProblemInstance& instance) {
  const Index m = instance.A.rows();
  const Index n = instance.A.cols();
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "sensing matrix must be at least 1x1");
  }
  if (instance.b.size() != m) {
    std::ostringstream msg;
    msg << "A has " << m << " rows but b has length " << instance.b.size();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (instance.weights.size() != n) {
    std::ostringstream msg;
    msg << "A has " << n << " columns but weights has length " << instance.weights.size();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (!instance.A.allFinite() || !instance.b.allFinite() || !instance.weights.allFinite() ||
      !std::isfinite(instance.epsilon) || !std::isfinite(instance.gamma)) {
    throw Error(ErrorCode::NonFiniteData, "instance contains non-finite values");
  }
  if (!(instance.epsilon > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "epsilon must be positive");
  }
  if (!(instance.gamma > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "gamma must be positive");
  }
  if ((instance.weights.array() < 0.0).any()) {
    throw Error(ErrorCode::NegativeWeight, "weights must be nonnegative");
  }
}

double residual_sq(const ProblemInstance& instance, const Vector& x) {
  if (x.size() != instance.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "x length does not match the number of columns");
  }
  return (instance.A * x - instance.b).squaredNorm();
}

std::size_t count_support(const Vector& x, double threshold) {
  return static_cast<std::size_t>((x.array().abs() > threshold).count());
}

IndexSet support_of(const Vector& x, double threshold) {
  IndexSet out;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > threshold) out.push_back(i);
  }
  return out;
}

double objective(const ProblemInstance& instance, const Vector& x, double support_threshold) {
  if (x.size() != instance.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "x length does not match the number of columns");
  }
  const double ridge = (instance.weights.array() * x.array()).matrix().squaredNorm();
  return static_cast<double>(count_support(x, support_threshold)) + ridge / instance.gamma;
}

double projection_residual_sq(const Matrix& A, const Vector& b, const IndexSet& columns) {
  if (columns.empty()) return b.squaredNorm();
  Matrix sub(A.rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) sub.col(static_cast<Index>(k)) = A.col(columns[k]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
  const Vector coef = cod.solve(b);
  return (sub * coef - b).squaredNorm();
}

double projection_residual_sq(const Matrix& A, const Vector& b) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  const Vector coef = cod.solve(b);
  return (A * coef - b).squaredNorm();
}

Vector scatter(const Vector& values, const IndexSet& columns, Index n) {
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < columns.size(); ++k) out(columns[k]) = values(static_cast<Index>(k));
  return out;
}

IndexSet complement(const IndexSet& set, Index n) {
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Index i : set) taken[static_cast<std::size_t>(i)] = true;
  IndexSet out;
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

}  // namespace sparsecs
