#include "zakai/rng.hpp"

#include <cmath>
#include <numbers>

namespace zakai {

namespace {

inline void mul_hi_lo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 2> Philox2x64::block(std::uint64_t seed, std::uint64_t stream_id,
                                               std::uint64_t counter) {
  std::uint64_t x0 = counter;
  std::uint64_t x1 = stream_id;
  std::uint64_t key = seed;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    mul_hi_lo(kMultiplier, x0, hi, lo);
    x0 = hi ^ key ^ x1;
    x1 = lo;
    key += kWeylIncrement;
  }
  return {x0, x1};
}

double uniform_half_open(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

double uniform_open_closed(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

void PhiloxGaussianStream::fill(std::span<double> out) {
  std::size_t i = 0;
  if (has_spare_ && i < out.size()) {
    out[i++] = spare_;
    has_spare_ = false;
  }
  while (i < out.size()) {
    const auto words = Philox2x64::block(seed_, stream_id_, counter_++);
    // u1 in (0, 1] keeps log() finite; u2 in [0, 1) spans the full angle.
    const double u1 = uniform_open_closed(words[0]);
    const double u2 = uniform_half_open(words[1]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i++] = radius * std::cos(angle);
    const double second = radius * std::sin(angle);
    if (i < out.size()) {
      out[i++] = second;
    } else {
      spare_ = second;
      has_spare_ = true;
    }
  }
}

void ZeroGaussianStream::fill(std::span<double> out) {
  for (double& v : out) v = 0.0;
}

StreamFactory philox_stream_factory(std::uint64_t seed) {
  return [seed](std::uint64_t stream_id) -> std::unique_ptr<GaussianStream> {
    return std::make_unique<PhiloxGaussianStream>(seed, stream_id);
  };
}

StreamFactory zero_stream_factory() {
  return [](std::uint64_t) -> std::unique_ptr<GaussianStream> {
    return std::make_unique<ZeroGaussianStream>();
  };
}

}  // namespace zakai
