#pragma once

// Substream derivation for reproducible parallel Monte Carlo. Every
// (master seed, trial, stream) triple maps to an independently seeded
// engine, so a trial's draws never depend on which worker runs it.

#include <array>
#include <cstdint>
#include <limits>

namespace corrvote {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// xoshiro256++ (Blackman & Vigna), state filled from splitmix64.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept {
    for (auto& word : state_) {
      word = splitmix64(seed);
      seed += 0x9E3779B97F4A7C15ull;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

using Engine = Xoshiro256pp;

/// Purpose tags for the substreams owned by a single trial.
enum class Stream : std::uint64_t {
  kProblem = 0,
  kTraining = 1,
  kRandomWinner = 2,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                           Stream stream) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return h;
}

inline Engine substream(std::uint64_t master, std::uint64_t trial, Stream stream) {
  return Engine(derive_seed(master, trial, stream));
}

}  // namespace corrvote
