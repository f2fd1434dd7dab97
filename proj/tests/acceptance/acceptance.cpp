// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rho/classical.hpp"
#include "rho/experiment.hpp"
#include "rho/scenarios.hpp"

using namespace rho;
namespace sc = rho::scenarios;
namespace cl = rho::classical;
namespace ex = rho::experiment;
using ex::json;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (cond ? "" : " [violated]");
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ex::ExperimentConfig config(const std::string& scenario, std::uint64_t n, std::uint64_t seed) {
  ex::ExperimentConfig c;
  c.scenario = scenario;
  c.n = n;
  c.seed = seed;
  return c;
}

bool stabilizing(const StabilizationVerdict& v) { return std::holds_alternative<Stabilizing>(v); }
bool non_stabilizing(const StabilizationVerdict& v) { return std::holds_alternative<NonStabilizing>(v); }

// ---------------------------------------------------------------------------

void fair_die(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = ex::run_experiment(config("fair-die", 600000, 42)).report;
  const double secs = seconds_since(t0);
  double worst = 0.0;
  for (const auto& e : r["estimates"]) worst = std::max(worst, std::abs(e["p"].get<double>() - 1.0 / 6.0));
  c.require(worst <= 0.005, "max|p-1/6| = " + fmt(worst) + " <= 0.005");
  c.require(r["verdict"]["kind"] == "stabilizing", "verdict " + r["verdict"]["kind"].get<std::string>());
  c.require(r["classification"]["class"] == "p-random", "class " + r["classification"]["class"].dump());
  c.require(secs < 5.0, "runtime " + fmt(secs, 3) + " s < 5 s");
}

struct ChordResult {
  double p = 0.0;
  double half_width = 0.0;
};

ChordResult bertrand(const std::string& id, std::uint64_t seed) {
  const auto r = ex::run_experiment(config(id, 1000000, seed)).report;
  const auto& longer = r["references"][0];
  return {longer["estimate"].get<double>(), longer["half_width"].get<double>()};
}

ChordResult g_endpoints;

void bertrand_endpoints(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  g_endpoints = bertrand("bertrand-endpoints", 42);
  const double secs = seconds_since(t0);
  const double dev = std::abs(g_endpoints.p - 1.0 / 3.0);
  c.require(dev <= 0.003, "P(longer) = " + fmt(g_endpoints.p) + ", |dev from 1/3| = " + fmt(dev) + " <= 0.003");
  c.require(secs < 10.0, "runtime " + fmt(secs, 3) + " s < 10 s");
}

void bertrand_paradox(Check& c) {
  const auto radial = bertrand("bertrand-radial", 42);
  const auto disk = bertrand("bertrand-disk", 42);
  const double ref_radial = oracle::bertrand_radial_longer();
  const double ref_disk = oracle::bertrand_disk_longer();
  c.require(std::abs(radial.p - ref_radial) <= 0.003, "radial " + fmt(radial.p) + " vs oracle " + fmt(ref_radial));
  c.require(std::abs(disk.p - ref_disk) <= 0.003, "disk " + fmt(disk.p) + " vs oracle " + fmt(ref_disk));
  const ChordResult all[3] = {g_endpoints, radial, disk};
  double min_ratio = INFINITY;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      min_ratio = std::min(min_ratio, std::abs(all[a].p - all[b].p) / (all[a].half_width + all[b].half_width));
  c.require(min_ratio > 10.0, "min pairwise separation " + fmt(min_ratio, 4) + "x combined half-widths > 10x");
}

void cube_factory(Check& c) {
  const sc::CubeFactorySpec spec;
  const auto records = run_trials(sc::make_cube_factory(spec), 1000000, SeedSpec{42}, 4);
  const auto half = sc::cube_below(records, 1.0);
  const auto quarter = sc::cube_below(records, 0.75);
  const double oracle_075 = oracle::truncated_gaussian_cdf(spec.mean, spec.sigma, spec.lo, spec.hi, 0.75);
  c.require(std::abs(half.p - 0.5) <= 0.003, "P(x<=1) = " + fmt(half.p) + " within 0.003 of 0.5");
  c.require(std::abs(quarter.p - oracle_075) <= 0.003,
            "P(x<=0.75) = " + fmt(quarter.p) + " within 0.003 of oracle " + fmt(oracle_075));
}

void non_stabilization(Check& c) {
  constexpr std::size_t n = 100000;
  constexpr int runs = 200;
  const sc::DieWeights fair = sc::DieSpec{}.weights;
  struct Row {
    const char* name;
    RhoSystem system;
    bool drifting;
  };
  sc::WalkSpec flat;
  flat.trend = false;
  const std::vector<Row> rows{
      {"sublimating die", sc::make_sublimating_die(fair, 0.3, n), true},
      {"sunday walk", sc::make_nonstationary_walk(), true},
      {"zero-drift die", sc::make_sublimating_die(fair, 0.0, n), false},
      {"flat walk", sc::make_nonstationary_walk(flat), false},
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    int hits = 0;
    for (int r = 0; r < runs; ++r) {
      const auto rec = run_trials(rows[k].system, n, SeedSpec{50000 + 1000 * k + r}, 4);
      const auto v = test_stabilization(rec, rows[k].system.space(), {});
      hits += rows[k].drifting ? non_stabilizing(v) : stabilizing(v);
    }
    if (rows[k].drifting) {
      c.require(hits == runs, std::string(rows[k].name) + " non-stabilizing " + std::to_string(hits) + "/200 (need 200)");
    } else {
      c.require(hits >= 195, std::string(rows[k].name) + " stabilizing " + std::to_string(hits) + "/200 (need >= 195)");
    }
  }
}

void deterministic(Check& c) {
  const auto die = sc::make_deterministic_die(0);
  const auto rec = run_trials(die, 10000, SeedSpec{42}, 2);
  const auto f = relative_frequencies(rec, die.space()).frequencies();
  const std::vector<double> expected{1, 0, 0, 0, 0, 0};
  c.require(f == expected, "placed-die frequencies exactly (1,0,0,0,0,0)");
  const auto cls = classify(rec, die.space(), {}, {}).cls;
  c.require(cls == RandomnessClass::Deterministic, std::string("placed die class ") + to_string(cls));

  std::vector<TrialRecord> alt(100000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = {i, Discrete{i % 2}, std::nullopt};
  const auto coin = OutcomeSpace::discrete({"0", "1"});
  const auto result = classify(alt, coin, {}, {});
  const auto* st = std::get_if<Stabilizing>(&result.verdict);
  c.require(st && st->estimates[0] == 0.5 && st->estimates[1] == 0.5, "alternating sequence stabilizes at (1/2,1/2)");
  c.require(result.cls == RandomnessClass::Deterministic, std::string("alternating class ") + to_string(result.cls));
}

void prober_dependence(Check& c) {
  const auto bob_system = sc::make_bus_scenario({});
  const auto bob = run_trials(bob_system, 100000, SeedSpec{42}, 4);
  const auto p_catch = relative_frequencies(bob, bob_system.space()).frequency(0);
  c.require(std::abs(p_catch - 1.0 / 12.0) <= 0.005, "Bob P(catch) = " + fmt(p_catch) + " within 0.005 of 1/12");

  sc::BusScenarioSpec alice_spec;
  alice_spec.prober = sc::BusProber::TowerObserver;
  const auto alice = run_trials(sc::make_bus_scenario(alice_spec), 100000, SeedSpec{42}, 4);
  const double acc = sc::reading_accuracy(alice);
  c.require(acc == 1.0, "Alice prediction accuracy " + fmt(acc));

  const auto cam = sc::make_camera_die();
  const auto rec = run_trials(cam, 100000, SeedSpec{42}, 4);
  const double cond = sc::conditional_probability(rec, 5, 5).p;
  const double marginal = relative_frequencies(rec, cam.space()).frequency(5);
  c.require(cond == 1.0, "camera P(six | reading six) = " + fmt(cond));
  c.require(std::abs(marginal - 1.0 / 6.0) <= 0.005, "camera marginal P(six) = " + fmt(marginal));
}

void classical_equivalence(Check& c) {
  constexpr std::size_t n = 100000;
  for (std::size_t J : {2u, 6u, 52u}) {
    const auto a = cl::check_frequentist_agreement(cl::EquiprobableSpace(J), cl::any_of({0}), n, SeedSpec{42 + J}, 4);
    const double p = 1.0 / static_cast<double>(J);
    const double bound = 4.0 * oracle::binomial_se(p, static_cast<double>(n));
    c.require(std::abs(a.estimate - p) <= bound,
              "J=" + std::to_string(J) + " |p-1/J| = " + fmt(std::abs(a.estimate - p)) + " <= " + fmt(bound));
  }

  // Enumeration oracle: tuples of four throws containing at least one six.
  std::size_t favorable = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int d = 0; d < 6; ++d)
        for (int e = 0; e < 6; ++e) favorable += (a == 5 || b == 5 || d == 5 || e == 5) ? 1 : 0;
  const cl::Rational oracle_exact(static_cast<std::int64_t>(favorable), 1296);
  const auto a = cl::check_frequentist_agreement(cl::EquiprobableSpace(6), cl::at_least(5, 1, 4), 1000000,
                                                 SeedSpec{42}, 4);
  c.require(a.exact == oracle_exact, "exact " + std::to_string(a.exact.numerator()) + "/" +
                                         std::to_string(a.exact.denominator()) + " matches enumeration");
  const double dev = std::abs(a.estimate - cl::to_double(oracle_exact));
  c.require(dev <= 0.003, "de Mere estimate " + fmt(a.estimate) + ", |dev| = " + fmt(dev) + " <= 0.003");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Check& c) {
  const auto dir = std::filesystem::temp_directory_path() / "rhoprob_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t compared = 0;
  bool all_equal = true;
  for (const auto& entry : ex::list_scenarios()) {
    auto cfg = config(entry.id, 30000, 20240);
    if (entry.id != "cube-factory" && entry.id.rfind("bertrand", 0) != 0 && entry.id != "sunday-walk") {
      cfg.events.push_back(json{{"kind", "at_least"}, {"outcome", 0}, {"count", 1}, {"length", 2}});
    }
    std::string ref_report, ref_trace;
    int pass = 0;
    for (unsigned w : {1u, 1u, 2u, 8u}) {
      cfg.workers = w;
      cfg.out = (dir / "report.json").string();
      cfg.trace = (dir / "trace.csv").string();
      std::ostringstream sink;
      ex::run_and_write(cfg, sink);
      const auto report = slurp(cfg.out);
      const auto trace = slurp(cfg.trace);
      if (pass++ == 0) {
        ref_report = report;
        ref_trace = trace;
      } else {
        ++compared;
        if (report != ref_report || trace != ref_trace) {
          all_equal = false;
          c.require(false, entry.id + " differs at workers=" + std::to_string(w));
        }
      }
    }
  }
  std::filesystem::remove_all(dir);
  c.require(all_equal, std::to_string(compared) + " report+trace pairs byte-identical (rerun, workers 1/2/8)");
}

void normalization(Check& c) {
  double worst_sum = 0.0, worst_mass = 0.0;
  for (const auto& entry : ex::list_scenarios()) {
    const auto sys = ex::build_scenario(entry.id, {}, 50000);
    for (std::size_t n : {1u, 333u, 50000u}) {
      const auto rec = run_trials(sys, n, SeedSpec{n}, 2);
      const auto dist = relative_frequencies(rec, sys.space());
      const auto f = dist.frequencies();
      worst_sum = std::max(worst_sum, std::abs(std::accumulate(f.begin(), f.end(), 0.0) - 1.0));
      const auto density = sys.space().is_discrete() ? cl::discrete_density(f) : estimate_density(dist);
      worst_mass = std::max(worst_mass, std::abs(density.total_mass() - 1.0));
    }
  }
  c.require(worst_sum <= 1e-12, "max |sum f - 1| = " + fmt(worst_sum));
  c.require(worst_mass <= 1e-9, "max |density mass - 1| = " + fmt(worst_mass) + " <= 1e-9");

  auto st = derive_trial_stream(SeedSpec{10}, 0);
  int exact = 0;
  constexpr int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const double p = st.uniform();
    const std::uint64_t n0 = 1 + st.below(10'000'000);
    exact += binomial_half_width(p, 4 * n0) == binomial_half_width(p, n0) / 2.0;
  }
  c.require(exact == trials, "half-width halves exactly at 4n in " + std::to_string(exact) + "/" +
                                 std::to_string(trials) + " draws");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "fair die", fair_die},
      {2, "bertrand endpoints", bertrand_endpoints},
      {3, "bertrand radial and disk, paradox separation", bertrand_paradox},
      {4, "cube factory", cube_factory},
      {5, "non-stabilization and zero-drift controls", non_stabilization},
      {6, "deterministic die and alternating sequence", deterministic},
      {7, "prober dependence", prober_dependence},
      {8, "classical/frequentist equivalence", classical_equivalence},
      {9, "determinism across reruns and worker counts", determinism},
      {10, "normalization and half-width scaling", normalization},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Check c;
    try {
      crit.run(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("threw: ") + e.what());
    }
    failed += c.ok ? 0 : 1;
    std::printf("%s %2d %s: %s\n", c.ok ? "PASS" : "FAIL", crit.id, crit.name, c.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
