#pragma once

#include <cstdint>
#include <random>

namespace mlsf {

// Random stream used by every stochastic component. Draws are derived from
// the raw 64-bit engine output so that sequences are identical across
// standard library implementations.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method.
  double normal();

  std::uint64_t next_u64() { return engine_(); }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Named streams split off one master seed. Changing how many draws one agent
// consumes never perturbs another agent's stream.
enum class Stream : std::uint64_t {
  kLeaderAction = 1,
  kLeaderNoise = 2,
  kFollowerNoise = 3,
  kGame = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed of stream `stream`, instance `index` (e.g. leader number) under `master`.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace mlsf
