#include "rho/random.hpp"

#include <cmath>
#include <numbers>

namespace rho {

namespace {
constexpr std::uint64_t kTrialSalt = 0x632be59bd9b4e019ULL;
}

std::uint64_t TrialStream::below(std::uint64_t bound) noexcept {
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double TrialStream::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TrialStream derive_trial_stream(const SeedSpec& seeds,
                                std::uint64_t trial_index) noexcept {
  return TrialStream(mix64(mix64(seeds.master_seed) ^ mix64(trial_index + kTrialSalt)));
}

}  // namespace rho
