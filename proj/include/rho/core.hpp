#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rho/error.hpp"
#include "rho/random.hpp"

namespace rho {

struct Discrete {
  std::size_t label = 0;
  friend bool operator==(const Discrete&, const Discrete&) = default;
};

struct Continuous {
  double value = 0.0;
  friend bool operator==(const Continuous&, const Continuous&) = default;
};

using Outcome = std::variant<Discrete, Continuous>;

/// The attribute space of an experiment. Either J named discrete labels, or
/// a closed interval [lo, hi] accounted for in K equal-width cells.
class OutcomeSpace {
 public:
  static OutcomeSpace discrete(std::vector<std::string> labels);
  static OutcomeSpace continuous(double lo, double hi, std::size_t bins = 64);

  bool is_discrete() const noexcept { return discrete_; }
  /// J for discrete spaces, K for continuous ones.
  std::size_t size() const noexcept { return labels_.size(); }
  /// Label names; continuous cells are named cell_0 .. cell_{K-1}.
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double cell_width() const noexcept { return width_; }
  double cell_lo(std::size_t k) const noexcept;
  double cell_hi(std::size_t k) const noexcept;

  bool contains(const Outcome& o) const noexcept;
  /// Label index (discrete) or cell index (continuous). The value hi falls in
  /// the last cell. Requires contains(o).
  std::size_t index_of(const Outcome& o) const noexcept;

  std::optional<std::size_t> find_label(const std::string& name) const;

 private:
  OutcomeSpace() = default;

  bool discrete_ = true;
  std::vector<std::string> labels_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double width_ = 0.0;
};

/// Physical state of the test object. Scenarios use at most four slots.
struct State {
  std::array<double, 4> v{};
  double& operator[](std::size_t i) noexcept { return v[i]; }
  double operator[](std::size_t i) const noexcept { return v[i]; }
};

/// What the probing subsystem reports for one trial. `reading` is an
/// optional side-channel observation in label-index form, e.g. a camera frame
/// or a tower observer's forecast, taken before the outcome is registered.
struct Probe {
  Outcome outcome;
  std::optional<std::size_t> reading;
};

/// The initiating subsystem: realizes the initial conditions of a trial from
/// the trial's random stream.
struct Initializer {
  std::string name;
  std::function<State(std::uint64_t trial_index, TrialStream& stream)> prepare;
};

/// The test object: evolves initial conditions into a final state. May depend
/// on the trial index to model drift.
struct ObjectModel {
  std::string name;
  std::function<State(const State& initial, std::uint64_t trial_index)> evolve;
};

/// The probing subsystem: maps the final state onto an outcome.
struct Prober {
  std::string name;
  std::function<Probe(const State& final_state, std::uint64_t trial_index)> observe;
};

/// A partitioned probabilistic system: object + initiating subsystem +
/// probing subsystem over a declared outcome space. Immutable once built and
/// safe to share across threads (all parts must be pure functions).
class RhoSystem {
 public:
  RhoSystem(std::string descriptor, ObjectModel object, Initializer initializer,
            Prober prober, OutcomeSpace space);

  const std::string& descriptor() const noexcept { return descriptor_; }
  const ObjectModel& object() const noexcept { return object_; }
  const Initializer& initializer() const noexcept { return initializer_; }
  const Prober& prober() const noexcept { return prober_; }
  const OutcomeSpace& space() const noexcept { return space_; }

  /// One unchecked trial: initializer -> object -> prober.
  Probe execute(std::uint64_t trial_index, TrialStream& stream) const;

 private:
  std::string descriptor_;
  ObjectModel object_;
  Initializer initializer_;
  Prober prober_;
  OutcomeSpace space_;
};

struct TrialRecord {
  std::uint64_t index = 0;
  Outcome outcome;
  std::optional<std::size_t> reading;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Runs trial `trial_index` on its derived stream. Throws OutOfSupport if the
/// prober leaves the outcome space.
TrialRecord run_trial(const RhoSystem& system, std::uint64_t trial_index,
                      const SeedSpec& seeds);

/// Records 0..n-1. The result does not depend on `workers`; when several
/// trials fail, the error of the lowest failing index is rethrown.
std::vector<TrialRecord> run_trials(const RhoSystem& system, std::size_t n,
                                    const SeedSpec& seeds, unsigned workers = 1);

/// Index of a record's outcome within `space` (label or cell).
inline std::size_t index_in(const OutcomeSpace& space, const TrialRecord& r) {
  return space.index_of(r.outcome);
}

/// Raw real value of a continuous record; the label index for discrete ones.
double value_of(const TrialRecord& r) noexcept;

}  // namespace rho
