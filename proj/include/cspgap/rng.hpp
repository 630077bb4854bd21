#pragma once

#include <cstdint>
#include <random>

namespace cspgap {

// Stream purposes; combined with a block index to derive independent substreams.
enum class Purpose : std::uint64_t {
  Matching = 1,
  Hidden = 2,
  Noise = 3,
  Signal = 4,
  Trial = 5,
  Aux = 6,
};

// mt19937_64 plus platform-independent bounded draws (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng substream(std::uint64_t seed, Purpose purpose, std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace cspgap
