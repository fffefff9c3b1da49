#pragma once

#include <cstdint>
#include <vector>

namespace ocolt::rng {

// All randomness in the library flows through SplitMix64 used as a
// counter-based generator: the i-th output of a stream is a pure function of
// (master seed, stream id, i). Streams are therefore immutable, sharable
// across threads, and reproducible bit-for-bit across runs.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Stream ids. Regeneration attempts shift by kAttemptStride so every attempt
// draws from a disjoint stream family.
enum StreamId : std::uint64_t {
  kStreamInstanceA = 1,
  kStreamInstanceB = 2,
  kStreamCost1 = 3,
  kStreamCost2 = 4,
  kStreamPermutation = 5,
  kStreamBootstrap = 6,
  kStreamTest = 64,
};
inline constexpr std::uint64_t kAttemptStride = 1024;

class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t stream_id)
      : base_(mix(master_seed + kGolden * mix(stream_id + 1))) {}

  std::uint64_t bits(std::uint64_t i) const {
    return mix(base_ + (i + 1) * kGolden);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit(std::uint64_t i) const {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t i, double lo, double hi) const {
    return lo + (hi - lo) * unit(i);
  }

 private:
  std::uint64_t base_;
};

// Stateful view over a Stream for sequential draws (shuffles, samplers).
class Sequence {
 public:
  Sequence(std::uint64_t master_seed, std::uint64_t stream_id)
      : stream_(master_seed, stream_id) {}
  explicit Sequence(Stream stream) : stream_(stream) {}

  std::uint64_t next_bits() { return stream_.bits(counter_++); }

  double next_unit() {
    return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform integer in [0, n). Lemire multiply-shift; bias is far below
  // anything observable at the n used here.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_bits()) * n) >> 64);
  }

 private:
  Stream stream_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates permutation of 1..n.
inline std::vector<int> permutation_one_to_n(int n, Sequence& seq) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i + 1;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(
        seq.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace ocolt::rng
