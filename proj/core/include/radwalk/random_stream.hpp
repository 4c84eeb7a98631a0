#pragma once

#include <cstdint>
#include <random>

namespace radwalk {

/// A seeded source of uniforms, normals, gammas and betas.
///
/// Streams are keyed by (master seed, stream id, substream id); the key is
/// fed through std::seed_seq, so two streams with different keys are
/// statistically independent and a given key always yields the same
/// sequence. Simulations key one stream per trial so results do not depend
/// on how trials are distributed across workers.
///
/// Not thread-safe; give every worker its own stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

  using result_type = std::mt19937_64::result_type;
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  /// Gamma(shape, 1).
  double gamma(double shape);
  /// Beta(a, b) via the ratio of gammas.
  double beta(double a, double b);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::gamma_distribution<double> gamma_{1.0, 1.0};
};

}  // namespace radwalk
