#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rho/core.hpp"

namespace rho {

/// Counts and relative frequencies over an outcome space.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(OutcomeSpace space);

  const OutcomeSpace& space() const noexcept { return space_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t n() const noexcept { return n_; }

  void add(std::size_t index, std::uint64_t count = 1);
  void add(const TrialRecord& r) { add(index_in(space_, r)); }

  /// Folds another distribution over the same space into this one. Merging
  /// disjoint index ranges in ascending order equals a single pass.
  void merge(const EmpiricalDistribution& other);

  /// counts / n. Throws EmptyInput when n = 0.
  std::vector<double> frequencies() const;
  double frequency(std::size_t index) const;

 private:
  OutcomeSpace space_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

/// Tallies records into `space`. Throws EmptyInput on an empty sequence and
/// OutOfSupport when a record lies outside the space.
EmpiricalDistribution relative_frequencies(std::span<const TrialRecord> records,
                                           const OutcomeSpace& space);

struct FrequencyTrace {
  std::vector<std::string> labels;
  std::vector<std::size_t> checkpoints;
  std::vector<std::vector<double>> frequencies;

  /// CSV: header `n,<label_0>,...,<label_{J-1}>`, one row per checkpoint,
  /// frequencies with 9 significant digits.
  void write_csv(std::ostream& os) const;
};

/// ceil(min_n * ratio^k) for k = 0, 1, ... while <= n, then n itself if it is
/// not already the last checkpoint. A run shorter than min_n yields {n}.
std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t min_n = 1000,
                                               double ratio = 1.5);

/// Frequency vector over the first n_k records, for each checkpoint n_k.
/// Checkpoints must be strictly increasing, positive and <= records.size().
FrequencyTrace frequency_trace(std::span<const TrialRecord> records,
                               const OutcomeSpace& space,
                               std::span<const std::size_t> checkpoints);

struct StabilizationConfig {
  std::size_t blocks = 10;
  double burn_in = 0.1;
  double z = 4.0;
  double eps_abs = 0.0;
  std::size_t min_n = 1000;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Stabilizing {
  std::vector<double> estimates;
  std::vector<double> half_widths;
  std::size_t n_used = 0;
};

/// Worst block/pooled discrepancy, measured as deviation - allowance.
struct NonStabilizing {
  std::size_t entry = 0;
  std::size_t block = 0;
  double block_frequency = 0.0;
  double pooled_frequency = 0.0;
  double deviation = 0.0;
  double allowance = 0.0;
};

struct Inconclusive {
  std::size_t n = 0;
  std::size_t min_n = 0;
};

using StabilizationVerdict = std::variant<Stabilizing, NonStabilizing, Inconclusive>;

/// Block-frequency stabilization test.
///
/// The first floor(burn_in * n) records are discarded and the next
/// B * floor(rest / B) are split into B equal blocks (the remainder at the
/// tail is unused). For every entry j the block frequencies f_{j,b} are
/// compared against the pooled frequency p_j with allowance
///   tol_j = z * sqrt(p_j (1 - p_j) / n_block) + eps_abs.
/// Any |f_{j,b} - p_j| > tol_j makes the verdict NonStabilizing (reporting
/// the largest excess). n < min_n is Inconclusive.
StabilizationVerdict test_stabilization(std::span<const TrialRecord> records,
                                        const OutcomeSpace& space,
                                        const StabilizationConfig& config = {});

enum class RandomnessClass { PRandom, Deterministic, NonPRandom };

const char* to_string(RandomnessClass c) noexcept;

struct PredictorConfig {
  std::size_t order = 2;
  double train_fraction = 0.5;

  void validate() const;
};

/// Accuracy of an order-m empirical conditional predictor.
///
/// Trained on the first floor(train_fraction * n) records: for each context
/// of m previous outcomes it predicts the most frequent successor (lowest
/// label on ties; unseen contexts fall back to the overall most frequent
/// training outcome). Scored on the remaining records. Throws TooFewRecords
/// if fewer than 10 records can be scored.
double predictor_accuracy(std::span<const TrialRecord> records, const OutcomeSpace& space,
                          const PredictorConfig& pred = {});

struct Classification {
  RandomnessClass cls = RandomnessClass::PRandom;
  StabilizationVerdict verdict;
  /// Unset when the class was decided by the stabilization test alone.
  std::optional<double> accuracy;
  double baseline = 0.0;
  double threshold = 0.0;
};

/// p-random / deterministic / non-p-random. Throws InconclusiveInput when the
/// stabilization test is Inconclusive.
Classification classify(std::span<const TrialRecord> records, const OutcomeSpace& space,
                        const StabilizationConfig& config = {},
                        const PredictorConfig& pred = {});

inline RandomnessClass classify_randomness(std::span<const TrialRecord> records,
                                           const OutcomeSpace& space,
                                           const StabilizationConfig& config = {},
                                           const PredictorConfig& pred = {}) {
  return classify(records, space, config, pred).cls;
}

struct ProbabilityEstimate {
  double p = 0.0;
  double half_width = 0.0;
};

/// z * sqrt(p (1 - p) / n).
double binomial_half_width(double p, std::uint64_t n, double z = 4.0) noexcept;

ProbabilityEstimate estimate_probability(const EmpiricalDistribution& dist,
                                         std::size_t target, double z = 4.0);

/// Probability of an arbitrary event over the records (count / n).
ProbabilityEstimate estimate_event(std::span<const TrialRecord> records,
                                   const std::function<bool(const TrialRecord&)>& event,
                                   double z = 4.0);

/// Mixed density: point masses plus a piecewise-constant continuous part.
/// The continuous part stores the mass of each cell; heights are mass/width.
class DensityModel {
 public:
  struct Atom {
    double location = 0.0;
    double mass = 0.0;
  };

  DensityModel() = default;
  DensityModel(std::vector<Atom> atoms, double lo, double hi, std::vector<double> cell_masses);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool has_continuous_part() const noexcept { return !cell_masses_.empty(); }
  std::size_t cells() const noexcept { return cell_masses_.size(); }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double cell_width() const noexcept;

  double height(std::size_t k) const;
  /// Integral of the continuous part over cell k.
  double cell_mass(std::size_t k) const { return cell_masses_.at(k); }
  /// Atom masses plus the integral of the continuous part.
  double total_mass() const noexcept;

 private:
  std::vector<Atom> atoms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> cell_masses_;
};

/// Piecewise-constant density of a continuous-space distribution. Throws
/// WrongSpaceKind for a discrete space and EmptyInput when n = 0.
DensityModel estimate_density(const EmpiricalDistribution& dist);

}  // namespace rho
