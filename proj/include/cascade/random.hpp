#pragma once

#include <cstdint>
#include <random>

namespace cascade {

// A keyed random stream. Children are derived from the key alone, never
// from the engine state, so consuming draws from a parent does not change
// any child and children can be handed to concurrent workers.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t key) : key_(key), engine_(mix(key)) {}

  RandomStream child(std::uint64_t tag) const {
    return RandomStream(mix(key_ ^ mix(tag + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t key() const noexcept { return key_; }
  Engine& engine() noexcept { return engine_; }

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  Engine engine_;
};

}  // namespace cascade
