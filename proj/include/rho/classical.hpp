#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "rho/core.hpp"
#include "rho/stats.hpp"

namespace rho::classical {

using Rational = boost::rational<std::int64_t>;

/// J equally likely basic outcomes.
class EquiprobableSpace {
 public:
  /// Labels "0" .. "J-1".
  explicit EquiprobableSpace(std::size_t J);
  explicit EquiprobableSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  OutcomeSpace outcome_space() const { return OutcomeSpace::discrete(labels_); }

 private:
  std::vector<std::string> labels_;
};

/// A decidable event over L-tuples of basic outcomes.
struct ComposedEvent {
  std::size_t length = 1;
  std::function<bool(std::span<const std::size_t>)> predicate;
  std::string description;
};

/// Upper bound on J^L for exhaustive enumeration.
inline constexpr std::uint64_t kMaxEnumeration = 100'000'000;

/// favorable / J. Throws FavorableExceedsTotal when favorable > J.
Rational laplace_probability(const EquiprobableSpace& space, std::size_t favorable);

/// Exact probability by enumerating all J^L tuples. Throws
/// EnumerationTooLarge when J^L exceeds kMaxEnumeration.
Rational composed_event_probability(const EquiprobableSpace& space, const ComposedEvent& event);

// Event builders for the closed descriptor set.

/// Some basic outcome in `outcomes` (L = 1).
ComposedEvent any_of(std::vector<std::size_t> outcomes);
/// `outcome` appears at least `count` times among `length` draws.
ComposedEvent at_least(std::size_t outcome, std::size_t count, std::size_t length);
/// `outcome` appears exactly `count` times among `length` draws.
ComposedEvent exactly(std::size_t outcome, std::size_t count, std::size_t length);
/// `count` consecutive draws equal `outcome` somewhere in `length` draws.
ComposedEvent run_of(std::size_t outcome, std::size_t count, std::size_t length);
/// The certain event.
ComposedEvent always(std::size_t length = 1);

/// L iid uniform draws per trial; outcome labels {miss, hit} for the event.
RhoSystem make_tuple_system(const EquiprobableSpace& space, const ComposedEvent& event);

struct Agreement {
  Rational exact;
  double estimate = 0.0;
  double half_width = 0.0;
  bool agrees = false;
};

/// Exact value from enumeration against a relative-frequency estimate from n
/// simulated tuples; agrees iff |exact - estimate| <= half_width.
Agreement check_frequentist_agreement(const EquiprobableSpace& space, const ComposedEvent& event,
                                      std::size_t n, const SeedSpec& seeds, unsigned workers = 1,
                                      double z = 4.0);

/// Atoms at label index j with mass masses[j]. Throws InvalidArgument if the
/// masses do not sum to 1 within 1e-9.
DensityModel discrete_density(std::span<const double> masses);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace rho::classical
