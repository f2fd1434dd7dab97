#pragma once

#include <cstddef>
#include <cstdint>

namespace rho {

/// Master seed of a run. Every trial's random stream is a pure function of
/// (master_seed, trial_index); see derive_trial_stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
};

/// SplitMix64 finalizer (Stafford variant 13). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream for a single trial.
///
/// Draw k (k = 1, 2, ...) is mix64(key + k * kGamma), i.e. a SplitMix64
/// sequence started at `key`. The stream owns no hidden state beyond the
/// draw counter, so it can be recreated anywhere from (key, counter).
///
/// All derived variates (uniform reals, bounded integers, normals) are
/// computed here rather than through <random> distributions, whose output
/// is implementation-defined; results are bit-identical across toolchains.
class TrialStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit TrialStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject). bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal via the Box-Muller transform; consumes two draws.
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derivation rule: key = mix64(mix64(master_seed) ^ mix64(trial_index + kTrialSalt)).
/// Order-free: trial k's stream never depends on whether trials < k ran.
TrialStream derive_trial_stream(const SeedSpec& seeds,
                                std::uint64_t trial_index) noexcept;

}  // namespace rho
