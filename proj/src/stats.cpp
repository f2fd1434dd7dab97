#include "rho/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace rho {

EmpiricalDistribution::EmpiricalDistribution(OutcomeSpace space)
    : space_(std::move(space)), counts_(space_.size(), 0) {}

void EmpiricalDistribution::add(std::size_t index, std::uint64_t count) {
  if (index >= counts_.size()) throw InvalidArgument("label index out of range");
  counts_[index] += count;
  n_ += count;
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
  if (other.counts_.size() != counts_.size() || other.space_.labels() != space_.labels()) {
    throw InvalidArgument("cannot merge distributions over different spaces");
  }
  for (std::size_t j = 0; j < counts_.size(); ++j) counts_[j] += other.counts_[j];
  n_ += other.n_;
}

std::vector<double> EmpiricalDistribution::frequencies() const {
  if (n_ == 0) throw EmptyInput("relative frequency is undefined for n = 0");
  std::vector<double> f(counts_.size());
  const auto n = static_cast<double>(n_);
  for (std::size_t j = 0; j < counts_.size(); ++j) f[j] = static_cast<double>(counts_[j]) / n;
  return f;
}

double EmpiricalDistribution::frequency(std::size_t index) const {
  if (n_ == 0) throw EmptyInput("relative frequency is undefined for n = 0");
  return static_cast<double>(counts_.at(index)) / static_cast<double>(n_);
}

EmpiricalDistribution relative_frequencies(std::span<const TrialRecord> records,
                                           const OutcomeSpace& space) {
  if (records.empty()) throw EmptyInput("no trial records");
  EmpiricalDistribution dist(space);
  for (const auto& r : records) {
    if (!space.contains(r.outcome)) throw OutOfSupport(r.index, "record outside outcome space");
    dist.add(space.index_of(r.outcome));
  }
  return dist;
}

void FrequencyTrace::write_csv(std::ostream& os) const {
  os << 'n';
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  char buf[32];
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    os << checkpoints[k];
    for (double f : frequencies[k]) {
      std::snprintf(buf, sizeof buf, "%.9g", f);
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t min_n, double ratio) {
  if (n == 0) throw EmptyInput("no trial records");
  if (min_n == 0 || !(ratio > 1.0)) throw InvalidArgument("geometric schedule needs min_n >= 1 and ratio > 1");
  std::vector<std::size_t> out;
  for (int k = 0;; ++k) {
    const double raw = std::ceil(static_cast<double>(min_n) * std::pow(ratio, k));
    if (raw > static_cast<double>(n)) break;
    const auto c = static_cast<std::size_t>(raw);
    if (out.empty() || c > out.back()) out.push_back(c);
  }
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

FrequencyTrace frequency_trace(std::span<const TrialRecord> records, const OutcomeSpace& space,
                               std::span<const std::size_t> checkpoints) {
  if (records.empty()) throw EmptyInput("no trial records");
  FrequencyTrace trace;
  trace.labels = space.labels();
  EmpiricalDistribution running(space);
  std::size_t consumed = 0;
  for (std::size_t c : checkpoints) {
    if (c == 0 || c <= consumed || c > records.size()) {
      throw InvalidArgument("checkpoints must be strictly increasing within [1, n]");
    }
    for (; consumed < c; ++consumed) {
      const auto& r = records[consumed];
      if (!space.contains(r.outcome)) throw OutOfSupport(r.index, "record outside outcome space");
      running.add(space.index_of(r.outcome));
    }
    trace.checkpoints.push_back(c);
    trace.frequencies.push_back(running.frequencies());
  }
  return trace;
}

void StabilizationConfig::validate() const {
  if (blocks < 2) throw InvalidArgument("blocks must be >= 2");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw InvalidArgument("burn_in must lie in [0, 1)");
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidArgument("z must be positive");
  if (!(eps_abs >= 0.0) || !std::isfinite(eps_abs)) throw InvalidArgument("eps_abs must be >= 0");
}

StabilizationVerdict test_stabilization(std::span<const TrialRecord> records,
                                        const OutcomeSpace& space,
                                        const StabilizationConfig& config) {
  config.validate();
  const std::size_t n = records.size();
  const auto burn = static_cast<std::size_t>(std::floor(config.burn_in * static_cast<double>(n)));
  const std::size_t block_size = (n - burn) / config.blocks;
  if (n < config.min_n || block_size == 0) return Inconclusive{n, config.min_n};

  const std::size_t J = space.size();
  const std::size_t B = config.blocks;
  // per_block[b * J + j]
  std::vector<std::uint64_t> per_block(B * J, 0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < block_size; ++i) {
      const auto& r = records[burn + b * block_size + i];
      if (!space.contains(r.outcome)) throw OutOfSupport(r.index, "record outside outcome space");
      ++per_block[b * J + space.index_of(r.outcome)];
    }
  }

  const std::size_t n_used = B * block_size;
  std::vector<double> pooled(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    std::uint64_t total = 0;
    for (std::size_t b = 0; b < B; ++b) total += per_block[b * J + j];
    pooled[j] = static_cast<double>(total) / static_cast<double>(n_used);
  }

  std::optional<NonStabilizing> worst;
  double worst_excess = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double tol = binomial_half_width(pooled[j], block_size, config.z) + config.eps_abs;
    for (std::size_t b = 0; b < B; ++b) {
      const double f = static_cast<double>(per_block[b * J + j]) / static_cast<double>(block_size);
      const double dev = std::abs(f - pooled[j]);
      if (dev > tol && (!worst || dev - tol > worst_excess)) {
        worst_excess = dev - tol;
        worst = NonStabilizing{j, b, f, pooled[j], dev, tol};
      }
    }
  }
  if (worst) return *worst;

  Stabilizing s;
  s.n_used = n_used;
  s.estimates = pooled;
  s.half_widths.reserve(J);
  for (double p : pooled) s.half_widths.push_back(binomial_half_width(p, n_used, config.z));
  return s;
}

const char* to_string(RandomnessClass c) noexcept {
  switch (c) {
    case RandomnessClass::PRandom:
      return "p-random";
    case RandomnessClass::Deterministic:
      return "deterministic";
    case RandomnessClass::NonPRandom:
      return "non-p-random";
  }
  return "?";
}

void PredictorConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  }
  if (order > 16) throw InvalidArgument("predictor order must be <= 16");
}

namespace {

std::size_t argmax_lowest(const std::vector<std::uint64_t>& counts) {
  // std::max_element returns the first maximum, i.e. the lowest label on ties.
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

double predictor_accuracy(std::span<const TrialRecord> records, const OutcomeSpace& space,
                          const PredictorConfig& pred) {
  pred.validate();
  const std::size_t n = records.size();
  const std::size_t J = space.size();
  const std::size_t m = pred.order;

  double contexts = std::pow(static_cast<double>(J), static_cast<double>(m));
  if (contexts > 9.0e18) throw InvalidArgument("predictor context space too large");

  const auto n_train = static_cast<std::size_t>(std::floor(pred.train_fraction * static_cast<double>(n)));
  const std::size_t test_begin = std::max(n_train, m);
  if (n < test_begin + 10) {
    throw TooFewRecords("predictor needs at least 10 scored records, have " +
                        std::to_string(n > test_begin ? n - test_begin : 0));
  }

  std::vector<std::size_t> symbols(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!space.contains(records[i].outcome)) {
      throw OutOfSupport(records[i].index, "record outside outcome space");
    }
    symbols[i] = space.index_of(records[i].outcome);
  }

  auto context_at = [&](std::size_t i) {
    std::uint64_t key = 0;
    for (std::size_t k = i - m; k < i; ++k) key = key * J + symbols[k];
    return key;
  };

  std::vector<std::uint64_t> unigram(J, 0);
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> table;
  for (std::size_t i = 0; i < n_train; ++i) {
    ++unigram[symbols[i]];
    if (i < m) continue;
    auto& row = table[context_at(i)];
    if (row.empty()) row.assign(J, 0);
    ++row[symbols[i]];
  }
  const std::size_t fallback = argmax_lowest(unigram);

  std::unordered_map<std::uint64_t, std::size_t> prediction;
  prediction.reserve(table.size());
  for (const auto& [key, row] : table) prediction.emplace(key, argmax_lowest(row));

  std::size_t correct = 0;
  for (std::size_t i = test_begin; i < n; ++i) {
    const auto it = prediction.find(context_at(i));
    const std::size_t guess = it == prediction.end() ? fallback : it->second;
    if (guess == symbols[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n - test_begin);
}

Classification classify(std::span<const TrialRecord> records, const OutcomeSpace& space,
                        const StabilizationConfig& config, const PredictorConfig& pred) {
  Classification out;
  out.verdict = test_stabilization(records, space, config);
  if (std::holds_alternative<Inconclusive>(out.verdict)) {
    throw InconclusiveInput("stabilization test is inconclusive at n = " +
                            std::to_string(records.size()) + "; no classification");
  }
  if (std::holds_alternative<NonStabilizing>(out.verdict)) {
    out.cls = RandomnessClass::NonPRandom;
    return out;
  }

  const auto& est = std::get<Stabilizing>(out.verdict).estimates;
  out.baseline = *std::max_element(est.begin(), est.end());
  const double accuracy = predictor_accuracy(records, space, pred);
  out.accuracy = accuracy;

  const std::size_t n = records.size();
  const auto n_train = static_cast<std::size_t>(std::floor(pred.train_fraction * static_cast<double>(n)));
  const std::size_t n_test = n - std::max(n_train, pred.order);
  out.threshold = out.baseline + binomial_half_width(out.baseline, n_test, config.z);

  const bool degenerate = std::any_of(est.begin(), est.end(), [](double p) { return p == 1.0; });
  if (accuracy >= 0.99 || degenerate) {
    out.cls = RandomnessClass::Deterministic;
  } else if (accuracy <= out.threshold) {
    out.cls = RandomnessClass::PRandom;
  } else {
    out.cls = RandomnessClass::Deterministic;
  }
  return out;
}

double binomial_half_width(double p, std::uint64_t n, double z) noexcept {
  if (n == 0) return std::numeric_limits<double>::infinity();
  return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ProbabilityEstimate estimate_probability(const EmpiricalDistribution& dist, std::size_t target,
                                         double z) {
  if (dist.n() == 0) throw EmptyInput("probability is undefined for n = 0");
  if (target >= dist.space().size()) throw InvalidArgument("target label out of range");
  const double p = dist.frequency(target);
  return {p, binomial_half_width(p, dist.n(), z)};
}

ProbabilityEstimate estimate_event(std::span<const TrialRecord> records,
                                   const std::function<bool(const TrialRecord&)>& event, double z) {
  if (records.empty()) throw EmptyInput("probability is undefined for n = 0");
  std::uint64_t hits = 0;
  for (const auto& r : records) hits += event(r) ? 1 : 0;
  const double p = static_cast<double>(hits) / static_cast<double>(records.size());
  return {p, binomial_half_width(p, records.size(), z)};
}

DensityModel::DensityModel(std::vector<Atom> atoms, double lo, double hi,
                           std::vector<double> cell_masses)
    : atoms_(std::move(atoms)), lo_(lo), hi_(hi), cell_masses_(std::move(cell_masses)) {
  if (!cell_masses_.empty() && !(lo_ < hi_)) throw InvalidArgument("density support needs lo < hi");
  for (const auto& a : atoms_) {
    if (!(a.mass >= 0.0)) throw InvalidArgument("atom mass must be >= 0");
  }
  for (double m : cell_masses_) {
    if (!(m >= 0.0)) throw InvalidArgument("cell mass must be >= 0");
  }
}

double DensityModel::cell_width() const noexcept {
  return cell_masses_.empty() ? 0.0 : (hi_ - lo_) / static_cast<double>(cell_masses_.size());
}

double DensityModel::height(std::size_t k) const { return cell_masses_.at(k) / cell_width(); }

double DensityModel::total_mass() const noexcept {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.mass;
  for (double m : cell_masses_) total += m;
  return total;
}

DensityModel estimate_density(const EmpiricalDistribution& dist) {
  if (dist.space().is_discrete()) {
    throw WrongSpaceKind("density estimation needs a continuous outcome space");
  }
  return DensityModel({}, dist.space().lo(), dist.space().hi(), dist.frequencies());
}

}  // namespace rho
