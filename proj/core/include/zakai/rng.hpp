#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>

namespace zakai {

// Stream-id layout shared by every run: one stream per logical noise source, so
// any draw can be replayed independently of execution order.
inline constexpr std::uint64_t kInitialConditionStream = 0;  // signal starting point
inline constexpr std::uint64_t kSignalNoiseStream = 1;       // signal Brownian increments
inline constexpr std::uint64_t kObservationNoiseStream = 2;  // observation Brownian increments
inline constexpr std::uint64_t kFirstSampleStream = 3;       // Monte Carlo sample i uses stream 3 + i

// Philox 2x64, 10 rounds (Salmon, Moraes, Dror, Shaw; SC'11). Counter-based:
// the output block is a pure function of (seed, stream_id, counter), which is
// what makes per-sample streams replayable and thread-schedule independent.
struct Philox2x64 {
  static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
  static constexpr std::uint64_t kWeylIncrement = 0x9E3779B97F4A7C15ull;

  static std::array<std::uint64_t, 2> block(std::uint64_t seed, std::uint64_t stream_id,
                                            std::uint64_t counter);
};

// Converts the top 53 bits of a 64-bit word to a double. `HalfOpen` lands in
// [0, 1); `OpenClosed` lands in (0, 1] and is safe to pass to log().
double uniform_half_open(std::uint64_t word);
double uniform_open_closed(std::uint64_t word);

// Source of independent standard normal draws. Implementations must be pure
// functions of their construction arguments and the number of draws consumed
// so far; they may not share state across instances.
class GaussianStream {
public:
  virtual ~GaussianStream() = default;
  virtual void fill(std::span<double> out) = 0;

  double next() {
    double v = 0.0;
    fill({&v, 1});
    return v;
  }
};

// Box-Muller over Philox uniforms. Each block yields a pair of normals; the
// second of a pair is cached so consecutive fills of any sizes see the same
// underlying sequence.
class PhiloxGaussianStream final : public GaussianStream {
public:
  PhiloxGaussianStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  void fill(std::span<double> out) override;

private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Deterministic all-zeros stream: turns every Brownian increment off. Used to
// isolate drift dynamics and to reproduce hand-computed values in tests.
class ZeroGaussianStream final : public GaussianStream {
public:
  void fill(std::span<double> out) override;
};

// Maps a stream id to a fresh generator. Factories are how the estimator and
// the path simulator receive their noise; swapping the factory (e.g. for the
// zero stream) changes the randomness without touching the numerics.
using StreamFactory = std::function<std::unique_ptr<GaussianStream>(std::uint64_t stream_id)>;

StreamFactory philox_stream_factory(std::uint64_t seed);
StreamFactory zero_stream_factory();

}  // namespace zakai
