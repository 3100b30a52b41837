#include "sparsecs/sos/sos.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sparsecs/core/instance_io.hpp"

namespace sparsecs {

namespace {

// Gram matrix S(y) for y = (lambda, tau, t, r); monomials ordered (x, z, 1).
Matrix gram_matrix(const ProblemInstance& instance, double lambda, double tau, const Vector& t, const Vector& r) {
  const Index n = instance.cols();
  const Index c = 2 * n;  // constant monomial
  Matrix S = Matrix::Zero(2 * n + 1, 2 * n + 1);
  S.topLeftCorner(n, n) = tau * instance.A.transpose() * instance.A;
  S.topLeftCorner(n, n).diagonal() += instance.weights.array().square().matrix() / instance.gamma;
  const Vector atb = instance.A.transpose() * instance.b;
  for (Index i = 0; i < n; ++i) {
    S(i, n + i) = S(n + i, i) = -0.5 * t(i);
    S(n + i, n + i) = -r(i);
    S(i, c) = S(c, i) = 0.5 * t(i) - tau * atb(i);
    S(n + i, c) = S(c, n + i) = 0.5 * (1.0 + r(i));
  }
  S(c, c) = -lambda - tau * (instance.epsilon - instance.b.squaredNorm());
  return S;
}

using Monomial = std::pair<Index, Index>;  // indices into (x, z, 1), first <= second

// Coefficients of f - lambda - tau g - sum t_i h_i - sum r_i k_i, expanded term by term.
std::map<Monomial, double> expand_residual_polynomial(const ProblemInstance& instance, const SosCertificate& cert) {
  const Index n = instance.cols();
  const Index one = 2 * n;
  auto x = [](Index i) { return i; };
  auto z = [n](Index i) { return n + i; };
  std::map<Monomial, double> poly;
  auto add = [&poly](Index a, Index b, double v) { poly[{std::min(a, b), std::max(a, b)}] += v; };

  // f
  for (Index i = 0; i < n; ++i) {
    add(z(i), one, 1.0);
    add(x(i), x(i), instance.weights(i) * instance.weights(i) / instance.gamma);
  }
  // -lambda
  add(one, one, -cert.lambda);
  // -tau (eps - ||Ax - b||^2) = -tau eps + tau (sum_k (a_k'x)^2 - 2 b_k a_k'x + b_k^2)
  add(one, one, -cert.tau * instance.epsilon);
  for (Index k = 0; k < instance.rows(); ++k) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) add(x(i), x(j), cert.tau * instance.A(k, i) * instance.A(k, j));
      add(x(i), one, -2.0 * cert.tau * instance.b(k) * instance.A(k, i));
    }
    add(one, one, cert.tau * instance.b(k) * instance.b(k));
  }
  // -t_i (x_i z_i - x_i) - r_i (z_i^2 - z_i)
  for (Index i = 0; i < n; ++i) {
    add(x(i), z(i), -cert.t(i));
    add(x(i), one, cert.t(i));
    add(z(i), z(i), -cert.r(i));
    add(z(i), one, cert.r(i));
  }
  return poly;
}

}  // namespace

SosResult solve_sos_d1(const ProblemInstance& instance, const SosSettings& settings) {
  validate(instance);
  const Index n = instance.cols();
  if (n > settings.max_n) {
    throw Error(ErrorCode::ProblemTooLarge, "SOS relaxation limited to n <= " + std::to_string(settings.max_n));
  }
  // An empty residual set makes lambda unbounded above.
  if (projection_residual_sq(instance.A, instance.b) > instance.epsilon) {
    throw Error(ErrorCode::InfeasibleInstance, "residual set is empty");
  }
  const Index order = 2 * n + 1;
  // Variables: lambda, tau, t (n), r (n).
  const Index nv = 2 + 2 * n;
  ConicProgram program(nv);
  program.objective(0) = -1.0;
  program.set_lower(1, 0.0);
  program.add_cone(ConeKind::PositiveSemidefinite, order);

  const Vector zero_n = Vector::Zero(n);
  const Matrix base = gram_matrix(instance, 0.0, 0.0, zero_n, zero_n);
  program.cone_rhs = svec(base);
  auto column = [&](double lambda, double tau, const Vector& t, const Vector& r) {
    return Vector(svec(gram_matrix(instance, lambda, tau, t, r) - base));
  };
  // S(y) = h - G y with G = -(S(e_k) - S(0)).
  program.cone_matrix.col(0) = -column(1.0, 0.0, zero_n, zero_n);
  program.cone_matrix.col(1) = -column(0.0, 1.0, zero_n, zero_n);
  for (Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    program.cone_matrix.col(2 + i) = -column(0.0, 0.0, e, zero_n);
    program.cone_matrix.col(2 + n + i) = -column(0.0, 0.0, zero_n, e);
  }

  ConicSettings conic;
  conic.time_limit = settings.time_limit;
  conic.verbose = std::getenv("SPARSECS_IPM_TRACE") != nullptr;
  const ConicSolution sol = solve_conic(program, conic);

  SosResult out;
  out.status = sol.status;
  SosCertificate& cert = out.certificate;
  cert.lambda = sol.x(0);
  cert.tau = std::max(0.0, sol.x(1));
  cert.t = sol.x.segment(2, n);
  cert.r = sol.x.segment(2 + n, n);
  cert.S = gram_matrix(instance, cert.lambda, cert.tau, cert.t, cert.r);
  out.bound = cert.lambda;
  return out;
}

bool verify_certificate(const ProblemInstance& instance, const SosCertificate& certificate, double psd_tol,
                        double identity_tol) {
  validate(instance);
  const Index n = instance.cols();
  if (certificate.S.rows() != 2 * n + 1 || certificate.S.cols() != 2 * n + 1 || certificate.t.size() != n ||
      certificate.r.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "certificate dimensions do not match the instance");
  }
  if (!certificate.S.allFinite() || !std::isfinite(certificate.lambda) || !std::isfinite(certificate.tau)) {
    return false;
  }
  if (certificate.tau < 0.0) return false;
  if ((certificate.S - certificate.S.transpose()).cwiseAbs().maxCoeff() > identity_tol) return false;

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (certificate.S + certificate.S.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -psd_tol) return false;

  const auto poly = expand_residual_polynomial(instance, certificate);
  const Index size = 2 * n + 1;
  for (Index a = 0; a < size; ++a) {
    for (Index b = a; b < size; ++b) {
      const auto it = poly.find({a, b});
      const double expected = it == poly.end() ? 0.0 : it->second;
      const double from_gram = a == b ? certificate.S(a, a) : certificate.S(a, b) + certificate.S(b, a);
      if (std::abs(expected - from_gram) > identity_tol * std::max(1.0, std::abs(expected))) return false;
    }
  }
  return true;
}

std::string format_certificate(const SosCertificate& c) {
  std::ostringstream out;
  auto vec = [&out](const Vector& v) {
    out << '[';
    for (Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format_real(v(i));
    out << ']';
  };
  out << "{\n  \"schema_version\": 1,\n  \"monomials\": \"x,z,1\",\n  \"lambda\": " << format_real(c.lambda)
      << ",\n  \"tau\": " << format_real(c.tau) << ",\n  \"t\": ";
  vec(c.t);
  out << ",\n  \"r\": ";
  vec(c.r);
  out << ",\n  \"S\": [";
  for (Index i = 0; i < c.S.rows(); ++i) {
    out << (i ? ",\n    " : "\n    ");
    vec(c.S.row(i).transpose());
  }
  out << "\n  ]\n}\n";
  return out.str();
}

SosCertificate parse_certificate(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
    SosCertificate c;
    c.lambda = doc.at("lambda").get<double>();
    c.tau = doc.at("tau").get<double>();
    const auto t = doc.at("t").get<std::vector<double>>();
    const auto r = doc.at("r").get<std::vector<double>>();
    c.t = Eigen::Map<const Vector>(t.data(), static_cast<Index>(t.size()));
    c.r = Eigen::Map<const Vector>(r.data(), static_cast<Index>(r.size()));
    const auto rows = doc.at("S").get<std::vector<std::vector<double>>>();
    c.S.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw Error(ErrorCode::DimensionMismatch, "S must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) c.S(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid certificate JSON: ") + e.what());
  }
}

void write_certificate(const std::filesystem::path& path, const SosCertificate& certificate) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write certificate file " + path.string());
  out << format_certificate(certificate);
}

SosCertificate read_certificate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open certificate file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_certificate(buffer.str());
}

}  // namespace sparsecs
