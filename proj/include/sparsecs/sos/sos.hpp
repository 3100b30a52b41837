#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "sparsecs/core/conic.hpp"
#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Degree-1 certificate that f(z, x) - lambda is nonnegative on
///   {(z, x) : eps - ||Ax - b||^2 >= 0,  x_i z_i = x_i,  z_i^2 = z_i}
/// where f(z, x) = sum z_i + (1/gamma) sum w_i^2 x_i^2:
///
///   f - lambda = m' S m + tau (eps - ||Ax - b||^2) + sum t_i (x_i z_i - x_i) + sum r_i (z_i^2 - z_i)
///
/// with monomial vector m = (x_1..x_n, z_1..z_n, 1), S >= 0 and tau >= 0.
struct SosCertificate {
  double lambda = 0.0;
  Matrix S;  // (2n+1) x (2n+1), symmetric
  double tau = 0.0;
  Vector t;
  Vector r;
};

struct SosResult {
  double bound = 0.0;
  SosCertificate certificate;
  SolverStatus status;
};

struct SosSettings {
  Index max_n = 200;  // the PSD block has order 2n+1
  std::chrono::duration<double> time_limit{std::numeric_limits<double>::infinity()};
};

/// Maximizes lambda over degree-1 certificates (a semidefinite program).
/// A non-Optimal status still returns the last iterate's certificate.
SosResult solve_sos_d1(const ProblemInstance& instance, const SosSettings& settings = {});

/// Solver-independent check of a certificate: S has no eigenvalue below
/// -psd_tol, tau >= 0, and the polynomial identity holds coefficient by
/// coefficient within identity_tol * max(1, |coefficient|).
bool verify_certificate(const ProblemInstance& instance, const SosCertificate& certificate,
                        double psd_tol = 1e-7, double identity_tol = 1e-6);

/// JSON with dense row-major S.
std::string format_certificate(const SosCertificate& certificate);
SosCertificate parse_certificate(const std::string& json_text);
void write_certificate(const std::filesystem::path& path, const SosCertificate& certificate);
SosCertificate read_certificate(const std::filesystem::path& path);

}  // namespace sparsecs
