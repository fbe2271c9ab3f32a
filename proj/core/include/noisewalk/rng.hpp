#pragma once

#include <array>
#include <cstdint>

namespace noisewalk {

/// SplitMix64 finalizer (Stafford mix 13). Bijective 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent experiment stream inside one master seed family.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

/// Identifies one trajectory: the substream key is
/// mix64(master_seed ^ mix64(index + golden)), independent of thread layout.
struct SeedRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;

  std::uint64_t substream_key() const { return derive_seed(master_seed, index); }
  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator: Philox4x32-10 keyed by a 64-bit substream key,
/// counter incremented once per 128-bit block.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    if (have_ == 0) refill();
    return buffer_[--have_];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_used() const { return counter_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int have_ = 0;
};

}  // namespace noisewalk
