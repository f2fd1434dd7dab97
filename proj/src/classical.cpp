#include "rho/classical.hpp"

#include <algorithm>
#include <cmath>

namespace rho::classical {

EquiprobableSpace::EquiprobableSpace(std::size_t J) {
  if (J == 0) throw InvalidArgument("equiprobable space needs J >= 1");
  labels_.reserve(J);
  for (std::size_t j = 0; j < J; ++j) labels_.push_back(std::to_string(j));
}

EquiprobableSpace::EquiprobableSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  // Validates non-empty and unique.
  (void)OutcomeSpace::discrete(labels_);
}

Rational laplace_probability(const EquiprobableSpace& space, std::size_t favorable) {
  if (favorable > space.size()) {
    throw FavorableExceedsTotal(std::to_string(favorable) + " favorable cases exceed " +
                                std::to_string(space.size()) + " possible cases");
  }
  return Rational(static_cast<std::int64_t>(favorable), static_cast<std::int64_t>(space.size()));
}

namespace {

std::uint64_t tuple_count(std::size_t J, std::size_t L) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < L; ++i) {
    if (total > kMaxEnumeration / J) {
      throw EnumerationTooLarge(std::to_string(J) + "^" + std::to_string(L) +
                                " tuples exceed the enumeration bound");
    }
    total *= J;
  }
  return total;
}

void check_event(const EquiprobableSpace& space, const ComposedEvent& event) {
  if (event.length == 0) throw InvalidArgument("composed event needs length >= 1");
  if (!event.predicate) throw InvalidArgument("composed event has no predicate");
  (void)space;
}

}  // namespace

Rational composed_event_probability(const EquiprobableSpace& space, const ComposedEvent& event) {
  check_event(space, event);
  const std::size_t J = space.size();
  const std::size_t L = event.length;
  const std::uint64_t total = tuple_count(J, L);

  std::vector<std::size_t> tuple(L, 0);
  std::uint64_t favorable = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    if (event.predicate(tuple)) ++favorable;
    // odometer increment, last position fastest
    for (std::size_t pos = L; pos-- > 0;) {
      if (++tuple[pos] < J) break;
      tuple[pos] = 0;
    }
  }
  return Rational(static_cast<std::int64_t>(favorable), static_cast<std::int64_t>(total));
}

ComposedEvent any_of(std::vector<std::size_t> outcomes) {
  std::string desc = "any_of{";
  for (std::size_t i = 0; i < outcomes.size(); ++i) desc += (i ? "," : "") + std::to_string(outcomes[i]);
  desc += "}";
  return {1,
          [outcomes = std::move(outcomes)](std::span<const std::size_t> t) {
            return std::find(outcomes.begin(), outcomes.end(), t[0]) != outcomes.end();
          },
          desc};
}

ComposedEvent at_least(std::size_t outcome, std::size_t count, std::size_t length) {
  return {length,
          [outcome, count](std::span<const std::size_t> t) {
            return static_cast<std::size_t>(std::count(t.begin(), t.end(), outcome)) >= count;
          },
          "at_least " + std::to_string(count) + " x " + std::to_string(outcome) + " in " +
              std::to_string(length)};
}

ComposedEvent exactly(std::size_t outcome, std::size_t count, std::size_t length) {
  return {length,
          [outcome, count](std::span<const std::size_t> t) {
            return static_cast<std::size_t>(std::count(t.begin(), t.end(), outcome)) == count;
          },
          "exactly " + std::to_string(count) + " x " + std::to_string(outcome) + " in " +
              std::to_string(length)};
}

ComposedEvent run_of(std::size_t outcome, std::size_t count, std::size_t length) {
  return {length,
          [outcome, count](std::span<const std::size_t> t) {
            if (count == 0) return true;
            std::size_t streak = 0;
            for (std::size_t x : t) {
              streak = x == outcome ? streak + 1 : 0;
              if (streak >= count) return true;
            }
            return false;
          },
          "run of " + std::to_string(count) + " x " + std::to_string(outcome) + " in " +
              std::to_string(length)};
}

ComposedEvent always(std::size_t length) {
  return {length, [](std::span<const std::size_t>) { return true; }, "always"};
}

RhoSystem make_tuple_system(const EquiprobableSpace& space, const ComposedEvent& event) {
  check_event(space, event);
  const std::size_t J = space.size();
  const std::size_t L = event.length;
  // The tuple does not fit the fixed-size State, so the initializer evaluates
  // the event on the drawn tuple and hands the object a 0/1 flag.
  Initializer draws{"uniform draws of " + std::to_string(L) + " basic outcomes",
                    [J, L, pred = event.predicate](std::uint64_t, TrialStream& s) {
                      std::vector<std::size_t> tuple(L);
                      for (auto& x : tuple) x = static_cast<std::size_t>(s.below(J));
                      State st;
                      st[0] = pred(tuple) ? 1.0 : 0.0;
                      return st;
                    }};
  ObjectModel object{"equiprobable chance device", [](const State& s, std::uint64_t) { return s; }};
  Prober judge{"event indicator (" + event.description + ")", [](const State& st, std::uint64_t) {
                 return Probe{Discrete{static_cast<std::size_t>(st[0])}, std::nullopt};
               }};
  return RhoSystem("equiprobable tuples", std::move(object), std::move(draws), std::move(judge),
                   OutcomeSpace::discrete({"miss", "hit"}));
}

Agreement check_frequentist_agreement(const EquiprobableSpace& space, const ComposedEvent& event,
                                      std::size_t n, const SeedSpec& seeds, unsigned workers,
                                      double z) {
  Agreement out;
  out.exact = composed_event_probability(space, event);
  const auto system = make_tuple_system(space, event);
  const auto records = run_trials(system, n, seeds, workers);
  const auto dist = relative_frequencies(records, system.space());
  const auto est = estimate_probability(dist, 1, z);
  out.estimate = est.p;
  out.half_width = est.half_width;
  out.agrees = std::abs(to_double(out.exact) - est.p) <= est.half_width;
  return out;
}

DensityModel discrete_density(std::span<const double> masses) {
  if (masses.empty()) throw InvalidArgument("discrete density needs at least one mass");
  double total = 0.0;
  std::vector<DensityModel::Atom> atoms;
  atoms.reserve(masses.size());
  for (std::size_t j = 0; j < masses.size(); ++j) {
    if (!(masses[j] >= 0.0)) throw InvalidArgument("negative mass");
    total += masses[j];
    atoms.push_back({static_cast<double>(j), masses[j]});
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("masses must sum to 1");
  return DensityModel(std::move(atoms), 0.0, 0.0, {});
}

}  // namespace rho::classical
