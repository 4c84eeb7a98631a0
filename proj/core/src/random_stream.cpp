#include "radwalk/random_stream.hpp"

#include <array>

namespace radwalk {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  const std::array<std::uint32_t, 7> key{
      static_cast<std::uint32_t>(seed),      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream),    static_cast<std::uint32_t>(stream >> 32),
      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32),
      0x72616477u,  // domain tag
  };
  std::seed_seq seq(key.begin(), key.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream, substream)) {}

double RandomStream::gamma(double shape) {
  return gamma_(engine_, std::gamma_distribution<double>::param_type(shape, 1.0));
}

double RandomStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

}  // namespace radwalk
