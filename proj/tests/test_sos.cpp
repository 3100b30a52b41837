#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sparsecs/experiments/oracle.hpp"
#include "sparsecs/relaxations/relaxations.hpp"
#include "sparsecs/sos/sos.hpp"
#include "support/test_util.hpp"

using namespace sparsecs;
using sparsecs::testutil::code_of;
using sparsecs::testutil::random_instance;
using sparsecs::testutil::synthetic;

TEST(Sos, ZeroFeasibleInstanceHasBoundNearZero) {
  auto inst = ProblemInstance::make(Matrix::Identity(2, 2), Vector{{0.3, 0.4}}, 0.5);
  const auto res = solve_sos_d1(inst);
  ASSERT_TRUE(res.status.optimal());
  EXPECT_LE(res.bound, 1e-6);
  EXPECT_GE(res.bound, -1e-6);
}

TEST(Sos, BoundSitsBetweenPerspectiveAndOptimum) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 5 + trial;
    auto inst = random_instance(rng, 4, n, 0.25);
    const auto res = solve_sos_d1(inst);
    ASSERT_TRUE(res.status.optimal()) << to_string(res.status.code);
    const double soc = solve_perspective_relaxation(inst).objective;
    const double opt = brute_force_oracle(inst).objective;
    EXPECT_GE(res.bound, soc - 1e-6);
    EXPECT_LE(res.bound, opt + 1e-6);
    EXPECT_TRUE(verify_certificate(inst, res.certificate));
  }
}

TEST(Sos, ImprovesOnPerspectiveOnAverage) {
  double margin = 0.0;
  int count = 0;
  for (double alpha : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8}) {
    for (std::uint64_t seed : {1u, 2u}) {
      auto inst = synthetic(25, 100, 10, alpha, seed);
      // With m > n the noise leaves a least-squares residual near 0.25 ||b||^2; small alpha is infeasible.
      if (projection_residual_sq(inst.A, inst.b) > inst.epsilon) {
        EXPECT_EQ(code_of([&] { solve_sos_d1(inst); }), ErrorCode::InfeasibleInstance);
        continue;
      }
      const auto res = solve_sos_d1(inst);
      ASSERT_TRUE(res.status.optimal());
      margin += res.bound - solve_perspective_relaxation(inst).objective;
      ++count;
    }
  }
  ASSERT_GT(count, 0);
  EXPECT_GT(margin / count, 0.0);
}

TEST(Sos, GuardsProblemSize) {
  std::mt19937_64 rng(42);
  auto inst = random_instance(rng, 3, 6, 0.3);
  SosSettings settings;
  settings.max_n = 5;
  EXPECT_EQ(code_of([&] { solve_sos_d1(inst, settings); }), ErrorCode::ProblemTooLarge);
}

TEST(Certificate, PerturbedDiagonalFailsPsdCheck) {
  std::mt19937_64 rng(43);
  auto inst = random_instance(rng, 4, 6, 0.3);
  auto cert = solve_sos_d1(inst).certificate;
  ASSERT_TRUE(verify_certificate(inst, cert));
  // The optimal Gram matrix is singular, so shifting its diagonal down breaks PSD.
  cert.S.diagonal().array() -= 1e-3;
  EXPECT_FALSE(verify_certificate(inst, cert));
}

TEST(Certificate, TrivialHandBuiltCertificateFailsIdentity) {
  // n = 1: f = z + x^2 / gamma is not the zero polynomial, so S = 0, tau = t = r = 0 cannot match.
  auto inst = ProblemInstance::make(Matrix{{1.0}}, Vector{{2.0}}, 1.0, 1.0);
  SosCertificate cert{0.0, Matrix::Zero(3, 3), 0.0, Vector::Zero(1), Vector::Zero(1)};
  EXPECT_FALSE(verify_certificate(inst, cert));
}

TEST(Certificate, HandBuiltValidCertificate) {
  // n = 1, A = [1], b = 2, eps = 1, gamma = 1: f - 0 = z + x^2. Take tau = t = 0 and
  // r = -1 so that -r (z^2 - z) cancels z: z + x^2 = x^2 + (z^2) - (z^2 - z).
  // Gram (x, z, 1): diag(1, 1, 0) with r = -1 gives z-z entry 1 and z-1 entry 0.
  auto inst = ProblemInstance::make(Matrix{{1.0}}, Vector{{2.0}}, 1.0, 1.0);
  SosCertificate cert{0.0, Matrix::Zero(3, 3), 0.0, Vector::Zero(1), Vector::Constant(1, -1.0)};
  cert.S(0, 0) = 1.0;
  cert.S(1, 1) = 1.0;
  EXPECT_TRUE(verify_certificate(inst, cert));
  cert.lambda = 0.5;  // the constant term no longer matches
  EXPECT_FALSE(verify_certificate(inst, cert));
}

TEST(Certificate, DimensionMismatch) {
  auto inst = ProblemInstance::make(Matrix{{1.0}}, Vector{{2.0}}, 1.0);
  SosCertificate cert{0.0, Matrix::Zero(4, 4), 0.0, Vector::Zero(1), Vector::Zero(1)};
  EXPECT_EQ(code_of([&] { verify_certificate(inst, cert); }), ErrorCode::DimensionMismatch);
}

TEST(Certificate, JsonRoundTripStillVerifies) {
  std::mt19937_64 rng(44);
  auto inst = random_instance(rng, 4, 7, 0.3);
  const auto cert = solve_sos_d1(inst).certificate;
  const auto path = std::filesystem::temp_directory_path() / "sparsecs_cert_roundtrip.json";
  write_certificate(path, cert);
  const auto back = read_certificate(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.S, cert.S);
  EXPECT_EQ(back.lambda, cert.lambda);
  EXPECT_EQ(back.t, cert.t);
  EXPECT_TRUE(verify_certificate(inst, back));
}
