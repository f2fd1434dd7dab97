#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rho/core.hpp"
#include "rho/stats.hpp"

namespace rho::scenarios {

using DieWeights = std::array<double, 6>;

/// Face labels face1 .. face6; label index k is the face showing k + 1 pips.
OutcomeSpace die_space();

struct DieSpec {
  DieWeights weights{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  /// Additive adjustment of the weights at a given trial index. The adjusted
  /// vector is clipped at 0 and renormalized before sampling.
  std::function<DieWeights(std::uint64_t trial_index)> drift;
};

/// Effective sampling weights of a die at a trial index.
DieWeights die_weights_at(const DieSpec& spec, std::uint64_t trial_index);

RhoSystem make_weighted_die(DieSpec spec);

inline RhoSystem make_fair_die() { return make_weighted_die(DieSpec{}); }

/// Face 0 weight moves linearly from w0 to w0 + total_drift over `horizon`
/// trials (held beyond); the other faces keep their relative proportions.
DieSpec sublimating_spec(const DieWeights& initial_weights, double total_drift, std::uint64_t horizon);

RhoSystem make_sublimating_die(const DieWeights& initial_weights, double total_drift,
                               std::uint64_t horizon);

/// Die placed by hand with `face` up; no randomizing initiator.
RhoSystem make_deterministic_die(std::size_t face);

enum class BertrandMethod { Endpoints, RadialMidpoint, DiskMidpoint };

const char* to_string(BertrandMethod m) noexcept;

/// Side of the equilateral triangle inscribed in the unit circle.
inline constexpr double kTriangleSide = 1.7320508075688772;

/// Chords of the unit circle; continuous chord length on [0, 2].
RhoSystem make_bertrand(BertrandMethod method, std::size_t bins = 64);

/// Exact P(chord longer than the inscribed triangle side) for each method.
double bertrand_reference(BertrandMethod method) noexcept;

/// P(longer) and P(not longer) from raw chord lengths.
struct ChordEventEstimate {
  ProbabilityEstimate longer;
  ProbabilityEstimate not_longer;
};
ChordEventEstimate bertrand_longer(std::span<const TrialRecord> records, double z = 4.0);

struct CubeFactorySpec {
  double mean = 1.0;   // cm
  double sigma = 0.25; // cm
  double lo = 0.0;
  double hi = 2.0;
};

/// Edge length drawn from N(mean, sigma) truncated to [lo, hi] by rejection.
RhoSystem make_cube_factory(const CubeFactorySpec& spec = {}, std::size_t bins = 64);

/// Analytic CDF of the truncated Gaussian at t.
double cube_cdf(const CubeFactorySpec& spec, double t);

/// P(x <= t) estimated from n fresh trials of a cube factory system.
ProbabilityEstimate cube_below(const RhoSystem& system, double threshold, std::size_t n,
                               const SeedSpec& seeds, unsigned workers = 1, double z = 4.0);

/// Same estimate over records already produced.
ProbabilityEstimate cube_below(std::span<const TrialRecord> records, double threshold,
                               double z = 4.0);

enum class BusProber { WindowWatcher, TowerObserver };

struct BusScenarioSpec {
  double cycle = 60.0; // minutes
  double window = 5.0; // minutes
  BusProber prober = BusProber::WindowWatcher;
};

/// Labels {catch, miss}. The tower observer also reports a reading: its
/// per-trial forecast (label index) from the observed bus position.
RhoSystem make_bus_scenario(const BusScenarioSpec& spec);

/// Fair die seen through a camera: the reading is the frame taken just before
/// the die settles (equal to the final face).
RhoSystem make_camera_die();

/// Fraction of records whose reading equals the outcome label. Records
/// without a reading are skipped; throws EmptyInput if none has one.
double reading_accuracy(std::span<const TrialRecord> records);

/// P(outcome = target | reading = given). Throws EmptyInput if no record
/// carries that reading.
ProbabilityEstimate conditional_probability(std::span<const TrialRecord> records,
                                            std::size_t target, std::size_t given,
                                            double z = 4.0);

struct WalkSpec {
  bool trend = true;
  std::uint64_t horizon = 100000;
  double plateau = 90.0;   // minutes, lazy years
  double noise = 30.0;     // half-range of the uniform day-to-day noise
  double lo = 0.0;
  double hi = 240.0;
};

/// Mean duration at a trial index: plateau over the first half of the
/// horizon, then a linear decline to zero.
double walk_trend(const WalkSpec& spec, std::uint64_t trial_index) noexcept;

/// Duration of a Sunday walk, minutes, continuous on [lo, hi].
RhoSystem make_nonstationary_walk(const WalkSpec& spec = {}, std::size_t bins = 64);

}  // namespace rho::scenarios
