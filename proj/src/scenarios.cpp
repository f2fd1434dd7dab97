#include "rho/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace rho::scenarios {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_simplex(const DieWeights& w, const char* what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument(std::string(what) + ": negative or non-finite weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument(std::string(what) + ": weights must sum to 1");
}

std::size_t sample_face(const DieWeights& w, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    acc += w[k];
    if (u < acc) return k;
  }
  // Trailing zero-weight faces are never selected through round-off.
  std::size_t last = 5;
  while (last > 0 && w[last] == 0.0) --last;
  return last;
}

Initializer throwing_hand() {
  return {"randomizing hand (uniform impulse u)",
          [](std::uint64_t, TrialStream& s) {
            State st;
            st[0] = s.uniform();
            return st;
          }};
}

Prober table_prober() {
  return {"table (reads the upward face)",
          [](const State& st, std::uint64_t) {
            return Probe{Discrete{static_cast<std::size_t>(st[0])}, std::nullopt};
          }};
}

}  // namespace

OutcomeSpace die_space() {
  return OutcomeSpace::discrete({"face1", "face2", "face3", "face4", "face5", "face6"});
}

DieWeights die_weights_at(const DieSpec& spec, std::uint64_t trial_index) {
  if (!spec.drift) return spec.weights;
  const DieWeights adj = spec.drift(trial_index);
  DieWeights w{};
  double total = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    w[k] = std::max(0.0, spec.weights[k] + adj[k]);
    total += w[k];
  }
  if (!(total > 0.0)) throw InvalidArgument("drifted die weights vanish");
  for (double& x : w) x /= total;
  return w;
}

RhoSystem make_weighted_die(DieSpec spec) {
  check_simplex(spec.weights, "die");
  const bool drifting = static_cast<bool>(spec.drift);
  ObjectModel die{drifting ? "die with trial-dependent weights" : "die with fixed weights",
                  [spec = std::move(spec)](const State& initial, std::uint64_t trial) {
                    State st;
                    st[0] = static_cast<double>(sample_face(die_weights_at(spec, trial), initial[0]));
                    return st;
                  }};
  return RhoSystem(drifting ? "drifting die" : "weighted die", std::move(die), throwing_hand(),
                   table_prober(), die_space());
}

DieSpec sublimating_spec(const DieWeights& initial_weights, double total_drift,
                         std::uint64_t horizon) {
  check_simplex(initial_weights, "sublimating die");
  if (horizon == 0) throw InvalidArgument("sublimating die needs a horizon >= 1");
  const double w0 = initial_weights[0];
  const double end = w0 + total_drift;
  if (end < 0.0 || end > 1.0) throw InvalidArgument("drifted face-0 weight leaves [0, 1]");
  if (w0 >= 1.0 && total_drift != 0.0) throw InvalidArgument("face 0 carries all the mass; nothing to drift into");

  DieSpec spec;
  spec.weights = initial_weights;
  if (total_drift == 0.0) return spec;
  const double rest = 1.0 - w0;
  spec.drift = [initial_weights, total_drift, horizon, rest](std::uint64_t trial) {
    const double t = static_cast<double>(std::min(trial, horizon)) / static_cast<double>(horizon);
    const double delta = total_drift * t;
    // Zero-sum adjustment: face 0 gains delta, the others lose in proportion.
    DieWeights adj{};
    adj[0] = delta;
    for (std::size_t k = 1; k < 6; ++k) adj[k] = -delta * initial_weights[k] / rest;
    return adj;
  };
  return spec;
}

RhoSystem make_sublimating_die(const DieWeights& initial_weights, double total_drift,
                               std::uint64_t horizon) {
  auto spec = sublimating_spec(initial_weights, total_drift, horizon);
  if (!spec.drift) return make_weighted_die(std::move(spec));
  auto sys = make_weighted_die(std::move(spec));
  return RhoSystem("sublimating die", sys.object(), sys.initializer(), sys.prober(), sys.space());
}

RhoSystem make_deterministic_die(std::size_t face) {
  if (face >= 6) throw InvalidArgument("die face index must be in [0, 6)");
  Initializer placing{"placing hand (face " + std::to_string(face + 1) + " up)",
                      [face](std::uint64_t, TrialStream&) {
                        State st;
                        st[0] = static_cast<double>(face);
                        return st;
                      }};
  ObjectModel die{"die at rest", [](const State& initial, std::uint64_t) { return initial; }};
  return RhoSystem("deterministic die", std::move(die), std::move(placing), table_prober(),
                   die_space());
}

const char* to_string(BertrandMethod m) noexcept {
  switch (m) {
    case BertrandMethod::Endpoints:
      return "endpoints";
    case BertrandMethod::RadialMidpoint:
      return "radial";
    case BertrandMethod::DiskMidpoint:
      return "disk";
  }
  return "?";
}

RhoSystem make_bertrand(BertrandMethod method, std::size_t bins) {
  // Every initializer produces the chord's endpoint angles (st[0], st[1]).
  Initializer init;
  switch (method) {
    case BertrandMethod::Endpoints:
      init = {"two independent spins of a pointer (uniform endpoint angles)",
              [](std::uint64_t, TrialStream& s) {
                State st;
                st[0] = s.uniform(0.0, kTwoPi);
                st[1] = s.uniform(0.0, kTwoPi);
                return st;
              }};
      break;
    case BertrandMethod::RadialMidpoint:
      init = {"uniform radius direction, midpoint uniform along the radius",
              [](std::uint64_t, TrialStream& s) {
                const double phi = s.uniform(0.0, kTwoPi);
                const double d = s.uniform();
                const double half = std::acos(d);
                State st;
                st[0] = phi - half;
                st[1] = phi + half;
                return st;
              }};
      break;
    case BertrandMethod::DiskMidpoint:
      init = {"midpoint uniform over the disk area",
              [](std::uint64_t, TrialStream& s) {
                const double phi = s.uniform(0.0, kTwoPi);
                const double d = std::sqrt(s.uniform());
                const double half = std::acos(d);
                State st;
                st[0] = phi - half;
                st[1] = phi + half;
                return st;
              }};
      break;
  }
  ObjectModel circle{"unit circle with a chord between the endpoints",
                     [](const State& ends, std::uint64_t) {
                       State st;
                       st[0] = 2.0 * std::abs(std::sin(0.5 * (ends[0] - ends[1])));
                       return st;
                     }};
  Prober ruler{"ruler (measures chord length)", [](const State& st, std::uint64_t) {
                 return Probe{Continuous{st[0]}, std::nullopt};
               }};
  return RhoSystem(std::string("bertrand chord (") + to_string(method) + ")", std::move(circle),
                   std::move(init), std::move(ruler), OutcomeSpace::continuous(0.0, 2.0, bins));
}

double bertrand_reference(BertrandMethod method) noexcept {
  switch (method) {
    case BertrandMethod::Endpoints:
      return 1.0 / 3.0;
    case BertrandMethod::RadialMidpoint:
      return 0.5;
    case BertrandMethod::DiskMidpoint:
      return 0.25;
  }
  return 0.0;
}

ChordEventEstimate bertrand_longer(std::span<const TrialRecord> records, double z) {
  const auto longer = estimate_event(
      records, [](const TrialRecord& r) { return value_of(r) > kTriangleSide; }, z);
  const double p_not = 1.0 - longer.p;
  return {longer, {p_not, longer.half_width}};
}

namespace {

void check_cube(const CubeFactorySpec& spec) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) throw InvalidArgument("cube factory needs sigma > 0");
  if (!(spec.lo < spec.hi)) throw InvalidArgument("cube factory needs lo < hi");
  if (!(spec.mean >= spec.lo && spec.mean <= spec.hi)) throw InvalidArgument("cube factory mean outside support");
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

RhoSystem make_cube_factory(const CubeFactorySpec& spec, std::size_t bins) {
  check_cube(spec);
  Initializer process{"fabrication process (Gaussian edge length, out-of-tolerance parts rejected)",
                      [spec](std::uint64_t, TrialStream& s) {
                        double x;
                        do {
                          x = spec.mean + spec.sigma * s.normal();
                        } while (x < spec.lo || x > spec.hi);
                        State st;
                        st[0] = x;
                        return st;
                      }};
  ObjectModel cube{"iron cube", [](const State& initial, std::uint64_t) { return initial; }};
  Prober caliper{"caliper (measures edge length, cm)", [](const State& st, std::uint64_t) {
                   return Probe{Continuous{st[0]}, std::nullopt};
                 }};
  return RhoSystem("cube factory", std::move(cube), std::move(process), std::move(caliper),
                   OutcomeSpace::continuous(spec.lo, spec.hi, bins));
}

double cube_cdf(const CubeFactorySpec& spec, double t) {
  check_cube(spec);
  if (t <= spec.lo) return 0.0;
  if (t >= spec.hi) return 1.0;
  const double a = std_normal_cdf((spec.lo - spec.mean) / spec.sigma);
  const double b = std_normal_cdf((spec.hi - spec.mean) / spec.sigma);
  return (std_normal_cdf((t - spec.mean) / spec.sigma) - a) / (b - a);
}

ProbabilityEstimate cube_below(std::span<const TrialRecord> records, double threshold, double z) {
  return estimate_event(records, [threshold](const TrialRecord& r) { return value_of(r) <= threshold; }, z);
}

ProbabilityEstimate cube_below(const RhoSystem& system, double threshold, std::size_t n,
                               const SeedSpec& seeds, unsigned workers, double z) {
  if (system.space().is_discrete()) throw WrongSpaceKind("cube_below needs a continuous system");
  if (!(threshold >= system.space().lo() && threshold <= system.space().hi())) {
    throw InvalidArgument("threshold outside the cube support");
  }
  const auto records = run_trials(system, n, seeds, workers);
  return cube_below(records, threshold, z);
}

RhoSystem make_bus_scenario(const BusScenarioSpec& spec) {
  if (!(spec.cycle > 0.0) || !(spec.window > 0.0) || !(spec.window < spec.cycle)) {
    throw InvalidArgument("bus scenario needs 0 < window < cycle");
  }
  Initializer city{"city traffic (bus phase uniform over the cycle)",
                   [cycle = spec.cycle](std::uint64_t, TrialStream& s) {
                     State st;
                     st[0] = s.uniform(0.0, cycle);
                     return st;
                   }};
  ObjectModel line{"bus line (minutes until the next bus)",
                   [](const State& initial, std::uint64_t) { return initial; }};
  const double window = spec.window;
  Prober prober;
  if (spec.prober == BusProber::WindowWatcher) {
    prober = {"window watcher at the stop (knows one bus per cycle)",
              [window](const State& st, std::uint64_t) {
                return Probe{Discrete{st[0] < window ? 0u : 1u}, std::nullopt};
              }};
  } else {
    prober = {"tower observer (sees the bus position, forecasts, then watches)",
              [window](const State& st, std::uint64_t) {
                const std::size_t forecast = st[0] < window ? 0 : 1;
                return Probe{Discrete{st[0] < window ? 0u : 1u}, forecast};
              }};
  }
  return RhoSystem(spec.prober == BusProber::WindowWatcher ? "bus stop (Bob)" : "bus stop (Alice)",
                   std::move(line), std::move(city), std::move(prober),
                   OutcomeSpace::discrete({"catch", "miss"}));
}

RhoSystem make_camera_die() {
  auto fair = make_fair_die();
  Prober camera{"table plus camera frame just before the die settles",
                [](const State& st, std::uint64_t) {
                  const auto face = static_cast<std::size_t>(st[0]);
                  return Probe{Discrete{face}, face};
                }};
  return RhoSystem("camera die", fair.object(), fair.initializer(), std::move(camera), die_space());
}

double reading_accuracy(std::span<const TrialRecord> records) {
  std::size_t seen = 0;
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (!r.reading) continue;
    ++seen;
    if (const auto* d = std::get_if<Discrete>(&r.outcome); d && d->label == *r.reading) ++hits;
  }
  if (seen == 0) throw EmptyInput("no record carries a reading");
  return static_cast<double>(hits) / static_cast<double>(seen);
}

ProbabilityEstimate conditional_probability(std::span<const TrialRecord> records,
                                            std::size_t target, std::size_t given, double z) {
  std::uint64_t seen = 0;
  std::uint64_t hits = 0;
  for (const auto& r : records) {
    if (!r.reading || *r.reading != given) continue;
    ++seen;
    if (const auto* d = std::get_if<Discrete>(&r.outcome); d && d->label == target) ++hits;
  }
  if (seen == 0) throw EmptyInput("no record carries reading " + std::to_string(given));
  const double p = static_cast<double>(hits) / static_cast<double>(seen);
  return {p, binomial_half_width(p, seen, z)};
}

double walk_trend(const WalkSpec& spec, std::uint64_t trial_index) noexcept {
  if (!spec.trend) return spec.plateau;
  const double t = std::min(1.0, static_cast<double>(trial_index) / static_cast<double>(spec.horizon));
  if (t <= 0.5) return spec.plateau;
  return spec.plateau * (1.0 - t) / 0.5;
}

RhoSystem make_nonstationary_walk(const WalkSpec& spec, std::size_t bins) {
  if (spec.horizon == 0) throw InvalidArgument("walk needs a horizon >= 1");
  if (!(spec.noise >= 0.0) || !(spec.lo < spec.hi)) throw InvalidArgument("invalid walk spec");
  if (spec.plateau < spec.lo || spec.plateau > spec.hi) throw InvalidArgument("walk plateau outside support");
  Initializer mood{"weather and mood of the day (uniform noise)",
                   [noise = spec.noise](std::uint64_t, TrialStream& s) {
                     State st;
                     st[0] = s.uniform(-noise, noise);
                     return st;
                   }};
  ObjectModel walker{spec.trend ? "walker (lazy-years plateau, then aging decline)"
                                : "walker (no long-term trend)",
                     [spec](const State& initial, std::uint64_t trial) {
                       State st;
                       st[0] = std::clamp(walk_trend(spec, trial) + initial[0], spec.lo, spec.hi);
                       return st;
                     }};
  Prober watch{"wrist watch (duration, minutes)", [](const State& st, std::uint64_t) {
                 return Probe{Continuous{st[0]}, std::nullopt};
               }};
  return RhoSystem(spec.trend ? "sunday walk" : "sunday walk (flat)", std::move(walker),
                   std::move(mood), std::move(watch), OutcomeSpace::continuous(spec.lo, spec.hi, bins));
}

}  // namespace rho::scenarios
