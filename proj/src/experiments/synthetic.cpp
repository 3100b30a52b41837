#include "sparsecs/experiments/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsecs {

namespace {

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
  auto seq = make_seed(seed, stream_id);
  engine_.seed(seq);
}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

SyntheticData generate(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.m < 1) throw Error(ErrorCode::DimensionMismatch, "n and m must be positive");
  if (spec.k < 0 || spec.k > spec.n) throw Error(ErrorCode::DimensionMismatch, "k must lie in [0, n]");
  if (!(spec.sigma > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "sigma must be positive");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "alpha must lie in (0, 1)");
  }
  const double scale = spec.sigma / std::sqrt(static_cast<double>(spec.n));
  auto stream = [&](SyntheticStream s) { return RandomStream(spec.seed, static_cast<std::uint64_t>(s)); };

  // Partial Fisher-Yates: the first k slots are the support.
  std::vector<Index> order(static_cast<std::size_t>(spec.n));
  std::iota(order.begin(), order.end(), Index{0});
  RandomStream support_rng = stream(SyntheticStream::Support);
  for (Index i = 0; i < spec.k; ++i) {
    const auto j = i + static_cast<Index>(support_rng.below(static_cast<std::uint64_t>(spec.n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  IndexSet support(order.begin(), order.begin() + spec.k);
  std::sort(support.begin(), support.end());

  Vector x_true = Vector::Zero(spec.n);
  RandomStream value_rng = stream(SyntheticStream::Values);
  for (Index i : support) x_true(i) = scale * value_rng.normal();

  Matrix A(spec.m, spec.n);
  RandomStream matrix_rng = stream(SyntheticStream::Matrix);
  for (Index i = 0; i < spec.m; ++i) {
    for (Index j = 0; j < spec.n; ++j) A(i, j) = scale * matrix_rng.normal();
  }

  Vector b = A * x_true;
  RandomStream noise_rng = stream(SyntheticStream::Noise);
  for (Index i = 0; i < spec.m; ++i) b(i) += spec.sigma * noise_rng.normal();

  const double epsilon = spec.alpha * b.squaredNorm();
  return {ProblemInstance::make(std::move(A), std::move(b), epsilon, spec.gamma), std::move(x_true)};
}

}  // namespace sparsecs
