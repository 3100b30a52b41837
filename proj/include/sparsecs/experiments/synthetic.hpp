#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// Reproducible random source: std::mt19937_64 seeded through std::seed_seq
/// with (seed, stream id). Both are specified bit-for-bit by the C++ standard;
/// the transforms below avoid the implementation-defined std distributions.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();                              // [0, 1) with 53 random bits
  double normal();                               // Box-Muller, standard normal
  std::uint64_t below(std::uint64_t bound);      // uniform on [0, bound)

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Substreams used by generate(); one per array so changing one array's size
/// leaves the others untouched.
enum class SyntheticStream : std::uint64_t { Support = 0, Values = 1, Matrix = 2, Noise = 3 };

struct SyntheticSpec {
  Index n = 0;
  Index m = 0;
  Index k = 0;
  double sigma = 10.0;
  double alpha = 0.2;
  std::uint64_t seed = 0;
  std::optional<double> gamma;  // default sqrt(n)
};

struct SyntheticData {
  ProblemInstance instance;
  Vector x_true;
};

/// x_true has k nonzeros ~ N(0, sigma^2/n) on a uniformly random subset;
/// A_ij ~ N(0, sigma^2/n); b = A x_true + eta with eta_j ~ N(0, sigma^2);
/// epsilon = alpha ||b||^2.
SyntheticData generate(const SyntheticSpec& spec);

}  // namespace sparsecs
