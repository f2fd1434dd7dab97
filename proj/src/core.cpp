#include "rho/core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

namespace rho {

OutcomeSpace OutcomeSpace::discrete(std::vector<std::string> labels) {
  if (labels.empty()) throw InvalidArgument("discrete outcome space needs at least one label");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InvalidArgument("duplicate outcome label '" + l + "'");
  }
  OutcomeSpace s;
  s.discrete_ = true;
  s.labels_ = std::move(labels);
  return s;
}

OutcomeSpace OutcomeSpace::continuous(double lo, double hi, std::size_t bins) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidArgument("continuous outcome space needs finite lo < hi");
  }
  if (bins == 0) throw InvalidArgument("continuous outcome space needs at least one cell");
  OutcomeSpace s;
  s.discrete_ = false;
  s.lo_ = lo;
  s.hi_ = hi;
  s.width_ = (hi - lo) / static_cast<double>(bins);
  s.labels_.reserve(bins);
  for (std::size_t k = 0; k < bins; ++k) s.labels_.push_back("cell_" + std::to_string(k));
  return s;
}

double OutcomeSpace::cell_lo(std::size_t k) const noexcept {
  return lo_ + static_cast<double>(k) * width_;
}

double OutcomeSpace::cell_hi(std::size_t k) const noexcept {
  return k + 1 == labels_.size() ? hi_ : lo_ + static_cast<double>(k + 1) * width_;
}

bool OutcomeSpace::contains(const Outcome& o) const noexcept {
  if (discrete_) {
    const auto* d = std::get_if<Discrete>(&o);
    return d != nullptr && d->label < labels_.size();
  }
  const auto* c = std::get_if<Continuous>(&o);
  return c != nullptr && std::isfinite(c->value) && c->value >= lo_ && c->value <= hi_;
}

std::size_t OutcomeSpace::index_of(const Outcome& o) const noexcept {
  if (discrete_) return std::get<Discrete>(o).label;
  const double x = std::get<Continuous>(o).value;
  const auto k = static_cast<std::size_t>((x - lo_) / width_);
  return std::min(k, labels_.size() - 1);
}

std::optional<std::size_t> OutcomeSpace::find_label(const std::string& name) const {
  const auto it = std::find(labels_.begin(), labels_.end(), name);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

RhoSystem::RhoSystem(std::string descriptor, ObjectModel object, Initializer initializer,
                     Prober prober, OutcomeSpace space)
    : descriptor_(std::move(descriptor)),
      object_(std::move(object)),
      initializer_(std::move(initializer)),
      prober_(std::move(prober)),
      space_(std::move(space)) {
  if (!object_.evolve || !initializer_.prepare || !prober_.observe) {
    throw InvalidArgument("rho-system '" + descriptor_ + "' is missing a subsystem");
  }
}

Probe RhoSystem::execute(std::uint64_t trial_index, TrialStream& stream) const {
  const State initial = initializer_.prepare(trial_index, stream);
  const State final_state = object_.evolve(initial, trial_index);
  return prober_.observe(final_state, trial_index);
}

TrialRecord run_trial(const RhoSystem& system, std::uint64_t trial_index,
                      const SeedSpec& seeds) {
  TrialStream stream = derive_trial_stream(seeds, trial_index);
  Probe probe = system.execute(trial_index, stream);
  if (!system.space().contains(probe.outcome)) {
    throw OutOfSupport(trial_index, "prober of '" + system.descriptor() +
                                        "' produced an outcome outside its space");
  }
  return TrialRecord{trial_index, probe.outcome, probe.reading};
}

std::vector<TrialRecord> run_trials(const RhoSystem& system, std::size_t n,
                                    const SeedSpec& seeds, unsigned workers) {
  if (n == 0) throw InvalidArgument("run_trials needs n >= 1");
  std::vector<TrialRecord> out(n);
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::size_t>(n, 256)));

  // Each worker owns the contiguous range [begin, end) and stops at its first
  // failure; the lowest failing index wins.
  struct Failure {
    std::uint64_t index = 0;
    std::exception_ptr error;
  };
  std::vector<std::optional<Failure>> failures(workers);

  auto work = [&](unsigned w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = run_trial(system, i, seeds);
      } catch (...) {
        failures[w] = Failure{i, std::current_exception()};
        return;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f->error);
  }
  return out;
}

double value_of(const TrialRecord& r) noexcept {
  if (const auto* c = std::get_if<Continuous>(&r.outcome)) return c->value;
  return static_cast<double>(std::get<Discrete>(r.outcome).label);
}

}  // namespace rho
