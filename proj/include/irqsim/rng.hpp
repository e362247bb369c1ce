#pragma once

#include <cstdint>
#include <string_view>

namespace irqsim {

// splitmix64: the fixed generator used everywhere so that runs reproduce
// bit-for-bit across platforms and language bindings. Reference: Steele,
// Lea & Flood, "Fast splittable pseudorandom number generators" (2014).
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); multiply-shift bounding (bias below 2^-64).
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_ = 0;
};

// Derives independent named substreams from one master seed. Each concern in
// the simulator (per-line entry jitter, load inter-arrival, per-task context
// costs, ...) draws from its own stream, so changing the draw count of one
// concern cannot shift any other concern's sequence.
class RngPool {
 public:
  explicit RngPool(std::uint64_t master) : master_(master) {}

  std::uint64_t master_seed() const { return master_; }

  Rng stream(std::string_view name) const {
    // FNV-1a over the name, mixed with the master seed through splitmix64.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    Rng mixer(master_ ^ h);
    return Rng(mixer.next());
  }

 private:
  std::uint64_t master_;
};

}  // namespace irqsim
