#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace carpet {

// Seeded deterministic randomness with independent streams.
//
// Contract (all consumers and test vectors depend on it, bit for bit):
//   * SplitMix64 is the seeder: state += 0x9E3779B97F4A7C15, then the
//     standard two-multiply finalizer.
//   * A stream is derived from (seed, stream_id) by one SplitMix64 step on
//     `seed`, offsetting the result by stream_id * 0x9E3779B97F4A7C15, and
//     drawing four SplitMix64 words as the xoshiro256** state.
//   * uniform01() maps the top 53 bits of next_u64() onto [0,1).
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 pre{seed};
    SplitMix64 sm{pre.next() + stream_id * 0x9E3779B97F4A7C15ULL};
    bool nonzero = false;
    for (auto& w : s_) {
      w = sm.next();
      nonzero |= (w != 0);
    }
    if (!nonzero) s_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Index into `probs` by inverse CDF; probs need not be normalized.
  int pick(const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    if (!(total > 0.0)) throw std::invalid_argument("pick: nonpositive mass");
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    for (std::size_t i = probs.size(); i-- > 0;)
      if (probs[i] > 0.0) return static_cast<int>(i);
    return 0;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace carpet
