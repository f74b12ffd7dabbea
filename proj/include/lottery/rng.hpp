#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace lottery {

// SplitMix64 step (Steele-Lea-Flood). Used only to spread seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Replica stream contract: replica r of master seed s is seeded with the
// SplitMix64 finalizer applied to s + (r+1)*2^64/phi. Fixed here so results
// are identical across machines, runs, and worker counts.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
  std::uint64_t z = master + (replica + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna, public domain), state expanded from the
// 64-bit seed by SplitMix64. All sampling in this project goes through an
// explicit SeedStream; nothing reads ambient entropy.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64_next(x);
  }

  static SeedStream for_replica(std::uint64_t master, std::uint64_t replica) {
    return SeedStream(replica_seed(master, replica));
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

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1}, unbiased via rejection.
  int uniform_int(int n) {
    assert(n > 0);
    const std::uint64_t un = std::uint64_t(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return int(x % un);
  }

  // Unit-rate exponential.
  double exponential() { return -std::log1p(-uniform01()); }

  // Forward Fisher-Yates; prefix after t steps is the prefix of the final
  // permutation, which the partial-shuffle fast paths rely on.
  template <class T>
  void shuffle(std::vector<T>& v) {
    const int n = int(v.size());
    for (int t = 0; t + 1 < n; ++t) {
      int j = t + uniform_int(n - t);
      std::swap(v[t], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace lottery
