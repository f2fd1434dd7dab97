#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rho/scenarios.hpp"
#include "rho/stats.hpp"

using namespace rho;
namespace sc = rho::scenarios;

namespace {

std::vector<TrialRecord> from_labels(const std::vector<std::size_t>& labels) {
  std::vector<TrialRecord> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({i, Discrete{labels[i]}, std::nullopt});
  return out;
}

std::vector<TrialRecord> from_values(const std::vector<double>& values) {
  std::vector<TrialRecord> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({i, Continuous{values[i]}, std::nullopt});
  return out;
}

std::vector<TrialRecord> coin_flips(std::size_t n, std::uint64_t seed) {
  const auto coin = sc::make_bus_scenario({2.0, 1.0, sc::BusProber::WindowWatcher});
  return run_trials(coin, n, SeedSpec{seed});
}

const OutcomeSpace kCoin = OutcomeSpace::discrete({"catch", "miss"});

}  // namespace

TEST_CASE("relative_frequencies: six distinct faces give exactly 1/6 each") {
  const auto d = relative_frequencies(from_labels({0, 1, 2, 3, 4, 5}), sc::die_space());
  CHECK(d.n() == 6);
  for (double f : d.frequencies()) CHECK(f == 1.0 / 6.0);
}

TEST_CASE("relative_frequencies: deterministic die gives (1,0,0,0,0,0)") {
  const auto r = run_trials(sc::make_deterministic_die(0), 1000, SeedSpec{1});
  const auto f = relative_frequencies(r, sc::die_space()).frequencies();
  CHECK(f == std::vector<double>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("relative_frequencies: fair coin within 0.006 of 1/2 at n = 100000") {
  CHECK(4.0 * oracle::binomial_se(0.5, 100000) < 0.0064);
  const auto d = relative_frequencies(coin_flips(100000, 5), kCoin);
  CHECK(std::abs(d.frequency(0) - 0.5) <= 0.006);
}

TEST_CASE("relative_frequencies: empty input and out-of-space records") {
  CHECK_THROWS_AS(relative_frequencies({}, kCoin), EmptyInput);
  CHECK_THROWS_AS(relative_frequencies(from_labels({0, 3}), kCoin), OutOfSupport);
  EmpiricalDistribution empty(kCoin);
  CHECK_THROWS_AS(empty.frequencies(), EmptyInput);
}

TEST_CASE("EmpiricalDistribution::merge over ascending disjoint ranges equals one pass") {
  auto st = derive_trial_stream(SeedSpec{11}, 0);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 1 + st.below(2000);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = st.below(6);
    const auto records = from_labels(labels);
    const auto whole = relative_frequencies(records, sc::die_space());

    std::vector<std::size_t> cuts{0, n};
    for (int c = 0; c < 3; ++c) cuts.push_back(st.below(n + 1));
    std::sort(cuts.begin(), cuts.end());
    EmpiricalDistribution merged(sc::die_space());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k] == cuts[k + 1]) continue;
      merged.merge(relative_frequencies(std::span(records).subspan(cuts[k], cuts[k + 1] - cuts[k]), sc::die_space()));
    }
    REQUIRE(merged.counts() == whole.counts());
    REQUIRE(merged.n() == whole.n());
    const auto f = merged.frequencies();
    REQUIRE(std::abs(std::accumulate(f.begin(), f.end(), 0.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("geometric_checkpoints") {
  CHECK(geometric_checkpoints(5000, 1000) == std::vector<std::size_t>{1000, 1500, 2250, 3375, 5000});
  CHECK(geometric_checkpoints(500, 1000) == std::vector<std::size_t>{500});
  CHECK(geometric_checkpoints(1000, 1000) == std::vector<std::size_t>{1000});
}

TEST_CASE("frequency_trace: fair die trajectories approach 1/6 within the binomial envelope") {
  const auto r = run_trials(sc::make_fair_die(), 100000, SeedSpec{8});
  const std::vector<std::size_t> cps{1000, 10000, 100000};
  const auto t = frequency_trace(r, sc::die_space(), cps);
  REQUIRE(t.checkpoints == cps);
  for (std::size_t k = 0; k < cps.size(); ++k) {
    const double envelope = 4.0 * oracle::binomial_se(1.0 / 6.0, static_cast<double>(cps[k]));
    double worst = 0.0;
    for (double f : t.frequencies[k]) worst = std::max(worst, std::abs(f - 1.0 / 6.0));
    CHECK(worst <= envelope);
    CHECK(std::abs(std::accumulate(t.frequencies[k].begin(), t.frequencies[k].end(), 0.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("frequency_trace: constant sequence gives identical (1,0,...) rows") {
  const auto r = from_labels(std::vector<std::size_t>(5000, 0));
  const auto cps = geometric_checkpoints(r.size(), 1000);
  const auto t = frequency_trace(r, sc::die_space(), cps);
  for (const auto& row : t.frequencies) CHECK(row == std::vector<double>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("frequency_trace: rejects bad schedules and empty input") {
  const auto r = from_labels({0, 1, 0, 1});
  const std::vector<std::size_t> decreasing{3, 2};
  const std::vector<std::size_t> too_far{5};
  CHECK_THROWS_AS(frequency_trace(r, kCoin, decreasing), InvalidArgument);
  CHECK_THROWS_AS(frequency_trace(r, kCoin, too_far), InvalidArgument);
  CHECK_THROWS_AS(frequency_trace({}, kCoin, too_far), EmptyInput);
}

TEST_CASE("FrequencyTrace CSV format") {
  FrequencyTrace t;
  t.labels = {"a", "b"};
  t.checkpoints = {3, 6};
  t.frequencies = {{1.0 / 3.0, 2.0 / 3.0}, {1.0, 0.0}};
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str() == "n,a,b\n3,0.333333333,0.666666667\n6,1,0\n");
}

TEST_CASE("test_stabilization: fair die at n = 600000 is Stabilizing near 1/6") {
  const auto r = run_trials(sc::make_fair_die(), 600000, SeedSpec{42}, 4);
  const auto v = test_stabilization(r, sc::die_space());
  REQUIRE(std::holds_alternative<Stabilizing>(v));
  const auto& s = std::get<Stabilizing>(v);
  CHECK(s.n_used == 540000);
  double total = 0.0;
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(std::abs(s.estimates[j] - 1.0 / 6.0) <= 0.005);
    CHECK(s.half_widths[j] == doctest::Approx(4.0 * std::sqrt(s.estimates[j] * (1 - s.estimates[j]) / 540000.0)));
    total += s.estimates[j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("test_stabilization: linearly drifting face weight is NonStabilizing") {
  sc::DieWeights fair;
  fair.fill(1.0 / 6.0);
  const auto die = sc::make_sublimating_die(fair, 0.3, 100000);
  const auto r = run_trials(die, 100000, SeedSpec{9});
  const auto v = test_stabilization(r, sc::die_space());
  REQUIRE(std::holds_alternative<NonStabilizing>(v));
  const auto& e = std::get<NonStabilizing>(v);
  CHECK(e.deviation > e.allowance);
  // The first or last block carries the largest excess.
  CHECK((e.block == 0 || e.block == 9));
}

TEST_CASE("test_stabilization: n < min_n is Inconclusive") {
  const auto r = run_trials(sc::make_fair_die(), 500, SeedSpec{1});
  const auto v = test_stabilization(r, sc::die_space());
  REQUIRE(std::holds_alternative<Inconclusive>(v));
  CHECK(std::get<Inconclusive>(v).n == 500);
  CHECK(std::holds_alternative<Inconclusive>(test_stabilization({}, sc::die_space())));
}

TEST_CASE("test_stabilization: eps_abs widens the allowance") {
  sc::DieWeights fair;
  fair.fill(1.0 / 6.0);
  const auto r = run_trials(sc::make_sublimating_die(fair, 0.3, 100000), 100000, SeedSpec{9});
  StabilizationConfig loose;
  loose.eps_abs = 0.5;
  CHECK(std::holds_alternative<Stabilizing>(test_stabilization(r, sc::die_space(), loose)));
}

TEST_CASE("StabilizationConfig validation") {
  StabilizationConfig c;
  c.blocks = 1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.burn_in = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.z = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.eps_abs = -1e-3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("half_width halves exactly when n quadruples") {
  auto st = derive_trial_stream(SeedSpec{4}, 0);
  for (int i = 0; i < 1000; ++i) {
    const double p = st.uniform();
    const std::uint64_t n0 = 1 + st.below(1'000'000);
    REQUIRE(binomial_half_width(p, 4 * n0) == binomial_half_width(p, n0) / 2.0);
  }
}

TEST_CASE("predictor_accuracy examples") {
  SUBCASE("constant sequence") {
    CHECK(predictor_accuracy(from_labels(std::vector<std::size_t>(100, 0)), kCoin) == 1.0);
  }
  SUBCASE("iid fair coin is near the 1/2 baseline") {
    CHECK(std::abs(predictor_accuracy(coin_flips(100000, 21), kCoin) - 0.5) <= 0.01);
  }
  SUBCASE("period-3 pattern with a 2-context") {
    std::vector<std::size_t> labels;
    for (int i = 0; i < 300; ++i) labels.push_back(static_cast<std::size_t>(i % 3));
    CHECK(predictor_accuracy(from_labels(labels), OutcomeSpace::discrete({"a", "b", "c"}), {2, 0.5}) == 1.0);
  }
  SUBCASE("too few records") {
    CHECK_THROWS_AS(predictor_accuracy(from_labels(std::vector<std::size_t>(18, 0)), kCoin), TooFewRecords);
    CHECK_NOTHROW(predictor_accuracy(from_labels(std::vector<std::size_t>(19, 0)), kCoin));
  }
  SUBCASE("ties go to the lowest label") {
    // Order 0: the training half holds five 0s and five 1s.
    std::vector<std::size_t> zeros{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    std::vector<std::size_t> ones = zeros;
    zeros.insert(zeros.end(), 10, 0);
    ones.insert(ones.end(), 10, 1);
    CHECK(predictor_accuracy(from_labels(zeros), kCoin, {0, 0.5}) == 1.0);
    CHECK(predictor_accuracy(from_labels(ones), kCoin, {0, 0.5}) == 0.0);
  }
}

TEST_CASE("classify_randomness examples") {
  SUBCASE("fair coin is p-random") {
    CHECK(classify_randomness(coin_flips(100000, 3), kCoin) == RandomnessClass::PRandom);
  }
  SUBCASE("alternating sequence stabilizes at (1/2,1/2) yet is deterministic") {
    std::vector<std::size_t> labels(100000);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
    const auto r = from_labels(labels);
    const auto c = classify(r, kCoin);
    REQUIRE(std::holds_alternative<Stabilizing>(c.verdict));
    CHECK(std::get<Stabilizing>(c.verdict).estimates == std::vector<double>{0.5, 0.5});
    CHECK(c.cls == RandomnessClass::Deterministic);
    CHECK(c.accuracy == 1.0);
  }
  SUBCASE("deterministic die") {
    const auto r = run_trials(sc::make_deterministic_die(2), 10000, SeedSpec{1});
    CHECK(classify_randomness(r, sc::die_space()) == RandomnessClass::Deterministic);
  }
  SUBCASE("small n is an error, not a class") {
    CHECK_THROWS_AS(classify(coin_flips(500, 1), kCoin), InconclusiveInput);
  }
}

TEST_CASE("estimate_probability examples") {
  EmpiricalDistribution d(kCoin);
  d.add(0, 3);
  d.add(1, 1);
  const auto e = estimate_probability(d, 0);
  CHECK(e.p == 0.75);
  CHECK(e.half_width == doctest::Approx(4.0 * std::sqrt(0.75 * 0.25 / 4.0)));
  CHECK(estimate_probability(d, 0, 2.0).half_width == doctest::Approx(e.half_width / 2.0));

  const auto det = relative_frequencies(run_trials(sc::make_deterministic_die(0), 1000, SeedSpec{}), sc::die_space());
  const auto p1 = estimate_probability(det, 0);
  CHECK(p1.p == 1.0);
  CHECK(p1.half_width == 0.0);

  CHECK_THROWS_AS(estimate_probability(EmpiricalDistribution(kCoin), 0), EmptyInput);
  CHECK_THROWS_AS(estimate_probability(d, 2), InvalidArgument);
}

TEST_CASE("estimate_density: all mass in one cell of width 0.5") {
  const auto space = OutcomeSpace::continuous(0.0, 2.0, 4);
  const auto dm = estimate_density(relative_frequencies(from_values({1.1, 1.2, 1.3, 1.4}), space));
  CHECK(dm.height(0) == 0.0);
  CHECK(dm.height(1) == 0.0);
  CHECK(dm.height(2) == 2.0);
  CHECK(dm.height(3) == 0.0);
  CHECK(dm.atoms().empty());
  CHECK(std::abs(dm.total_mass() - 1.0) <= 1e-9);
}

TEST_CASE("estimate_density: uniform on [0,2] gives heights near 0.5") {
  const auto space = OutcomeSpace::continuous(0.0, 2.0, 4);
  auto st = derive_trial_stream(SeedSpec{17}, 0);
  std::vector<double> xs(200000);
  for (auto& x : xs) x = st.uniform(0.0, 2.0);
  const auto dm = estimate_density(relative_frequencies(from_values(xs), space));
  // Cell mass se = sqrt(0.25 * 0.75 / n); height = mass / 0.5.
  const double tol = 4.0 * oracle::binomial_se(0.25, 200000) / 0.5;
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(dm.height(k) - 0.5) <= tol);
}

TEST_CASE("estimate_density rejects discrete spaces") {
  EmpiricalDistribution d(kCoin);
  d.add(0);
  CHECK_THROWS_AS(estimate_density(d), WrongSpaceKind);
}

TEST_CASE("binned frequencies equal the density's cell integrals exactly") {
  auto st = derive_trial_stream(SeedSpec{23}, 0);
  for (int round = 0; round < 20; ++round) {
    const std::size_t K = 1 + st.below(100);
    const auto space = OutcomeSpace::continuous(-1.0, 3.0, K);
    std::vector<double> xs(1 + st.below(5000));
    for (auto& x : xs) x = -1.0 + 4.0 * st.uniform() * st.uniform();
    const auto dist = relative_frequencies(from_values(xs), space);
    const auto dm = estimate_density(dist);
    const auto f = dist.frequencies();
    for (std::size_t k = 0; k < K; ++k) REQUIRE(dm.cell_mass(k) == f[k]);
    REQUIRE(std::abs(dm.total_mass() - 1.0) <= 1e-9);
  }
}
