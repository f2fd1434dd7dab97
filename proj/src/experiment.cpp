#include "rho/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "rho/classical.hpp"
#include "rho/scenarios.hpp"

namespace rho::experiment {

namespace {

namespace sc = rho::scenarios;
namespace cl = rho::classical;

using Params = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// parameter access

class ParamReader {
 public:
  ParamReader(const std::string& scenario, const std::vector<ParamDoc>& docs, const Params& given,
              std::uint64_t n)
      : scenario_(scenario) {
    for (const auto& d : docs) values_[d.name] = d.default_value == "n" ? std::to_string(n) : d.default_value;
    for (const auto& [k, v] : given) {
      if (!values_.count(k)) throw ConfigError("scenario '" + scenario + "' has no parameter '" + k + "'");
      values_[k] = v;
    }
  }

  double real(const std::string& name) const {
    const auto& s = values_.at(name);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x)) bad(name, "a finite real");
    return x;
  }

  std::uint64_t natural(const std::string& name) const {
    const auto& s = values_.at(name);
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size()) bad(name, "a non-negative integer");
    return x;
  }

  bool flag(const std::string& name) const {
    const auto& s = values_.at(name);
    if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "off" || s == "no") return false;
    bad(name, "a boolean");
  }

  std::vector<double> reals(const std::string& name) const {
    std::vector<double> out;
    std::stringstream ss(values_.at(name));
    std::string item;
    while (std::getline(ss, item, ',')) {
      double x = 0.0;
      const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
      if (ec != std::errc() || p != item.data() + item.size() || !std::isfinite(x)) bad(name, "a comma-separated list of reals");
      out.push_back(x);
    }
    if (out.empty()) bad(name, "a non-empty list");
    return out;
  }

  json effective() const {
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  [[noreturn]] void bad(const std::string& name, const char* expected) const {
    throw ConfigError("parameter '" + name + "' of '" + scenario_ + "' must be " + expected + ", got '" +
                      values_.at(name) + "'");
  }

  std::string scenario_;
  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// reference values

json reference_entry(const std::string& event, double reference, const ProbabilityEstimate& est) {
  return json{{"event", event},
              {"reference", reference},
              {"estimate", est.p},
              {"half_width", est.half_width},
              {"agrees", std::abs(reference - est.p) <= est.half_width}};
}

json die_references(const sc::DieWeights& weights, const EmpiricalDistribution& dist, double z,
                    bool fair) {
  json refs = json::array();
  const cl::EquiprobableSpace six(dist.space().labels());
  for (std::size_t k = 0; k < 6; ++k) {
    json e = reference_entry(dist.space().labels()[k], fair ? cl::to_double(cl::laplace_probability(six, 1)) : weights[k],
                             estimate_probability(dist, k, z));
    if (fair) e["exact"] = "1/6";
    refs.push_back(std::move(e));
  }
  return refs;
}

struct RunContext {
  const ParamReader& params;
  std::span<const TrialRecord> records;
  const EmpiricalDistribution& dist;
  double z;
};

struct ScenarioDef {
  std::string id;
  std::string summary;
  std::vector<ParamDoc> params;
  std::function<RhoSystem(const ParamReader&)> build;
  std::function<json(const RunContext&)> references;
};

json no_references(const RunContext&) { return json::array(); }

sc::BusScenarioSpec bus_spec(const ParamReader& p, sc::BusProber prober) {
  sc::BusScenarioSpec spec;
  spec.cycle = p.real("cycle");
  spec.window = p.real("window");
  spec.prober = prober;
  return spec;
}

sc::CubeFactorySpec cube_spec(const ParamReader& p) {
  sc::CubeFactorySpec spec;
  spec.mean = p.real("mean");
  spec.sigma = p.real("sigma");
  return spec;
}

std::size_t bins_of(const ParamReader& p) {
  const auto b = p.natural("bins");
  if (b == 0 || b > 100000) throw ConfigError("parameter 'bins' must be in [1, 100000]");
  return static_cast<std::size_t>(b);
}

ScenarioDef bertrand_def(const std::string& id, sc::BertrandMethod method, const std::string& summary) {
  return {id,
          summary,
          {{"bins", "64", "cells of the chord-length histogram on [0, 2]"}},
          [method](const ParamReader& p) { return sc::make_bertrand(method, bins_of(p)); },
          [method](const RunContext& ctx) {
            const auto est = sc::bertrand_longer(ctx.records, ctx.z);
            const double ref = sc::bertrand_reference(method);
            return json::array({reference_entry("longer_than_triangle_side", ref, est.longer),
                                reference_entry("not_longer_than_triangle_side", 1.0 - ref, est.not_longer)});
          }};
}

json bus_references(const RunContext& ctx, bool tower) {
  const double window = ctx.params.real("window");
  const double cycle = ctx.params.real("cycle");
  json refs = json::array({reference_entry("catch", window / cycle, estimate_probability(ctx.dist, 0, ctx.z))});
  if (tower) {
    const double acc = sc::reading_accuracy(ctx.records);
    refs.push_back(reference_entry("forecast_correct", 1.0,
                                   {acc, binomial_half_width(acc, ctx.records.size(), ctx.z)}));
    refs.push_back(reference_entry("catch_given_forecast_catch", 1.0,
                                   sc::conditional_probability(ctx.records, 0, 0, ctx.z)));
    refs.push_back(reference_entry("catch_given_forecast_miss", 0.0,
                                   sc::conditional_probability(ctx.records, 0, 1, ctx.z)));
  }
  return refs;
}

json camera_references(const RunContext& ctx) {
  constexpr std::size_t six = 5;
  json refs = json::array();
  refs.push_back(reference_entry("face6", 1.0 / 6.0, estimate_probability(ctx.dist, six, ctx.z)));
  refs.push_back(reference_entry("face6_given_reading_face6", 1.0,
                                 sc::conditional_probability(ctx.records, six, six, ctx.z)));
  std::uint64_t seen = 0;
  std::uint64_t hits = 0;
  for (const auto& r : ctx.records) {
    if (!r.reading || *r.reading == six) continue;
    ++seen;
    hits += std::get<Discrete>(r.outcome).label == six ? 1 : 0;
  }
  if (seen > 0) {
    const double p = static_cast<double>(hits) / static_cast<double>(seen);
    refs.push_back(reference_entry("face6_given_reading_other", 0.0, {p, binomial_half_width(p, seen, ctx.z)}));
  }
  refs.push_back(reference_entry("camera_correct", 1.0, {sc::reading_accuracy(ctx.records), 0.0}));
  return refs;
}

const std::vector<ScenarioDef>& registry() {
  static const std::vector<ScenarioDef> defs = [] {
    std::vector<ScenarioDef> d;
    d.push_back({"fair-die",
                 "regular die thrown by a randomizing hand, read off the table",
                 {},
                 [](const ParamReader&) { return sc::make_fair_die(); },
                 [](const RunContext& ctx) { return die_references({}, ctx.dist, ctx.z, true); }});
    d.push_back({"sublimating-die",
                 "die losing mass on one side: face-1 weight drifts linearly over the run",
                 {{"drift", "0.3", "total change of the face-1 weight over the horizon"},
                  {"horizon", "n", "trials over which the drift accrues (default: n)"}},
                 [](const ParamReader& p) {
                   sc::DieWeights fair;
                   fair.fill(1.0 / 6.0);
                   return sc::make_sublimating_die(fair, p.real("drift"), p.natural("horizon"));
                 },
                 [](const RunContext& ctx) {
                   if (ctx.params.real("drift") != 0.0) return json::array();
                   return die_references({}, ctx.dist, ctx.z, true);
                 }});
    d.push_back({"deterministic-die",
                 "die placed systematically with a fixed face up",
                 {{"face", "0", "label index of the face placed up (0 = face1)"}},
                 [](const ParamReader& p) {
                   const auto face = p.natural("face");
                   if (face >= 6) throw ConfigError("parameter 'face' must be in [0, 6)");
                   return sc::make_deterministic_die(face);
                 },
                 [](const RunContext& ctx) {
                   const auto face = ctx.params.natural("face");
                   json refs = json::array();
                   for (std::size_t k = 0; k < 6; ++k) {
                     refs.push_back(reference_entry(ctx.dist.space().labels()[k], k == face ? 1.0 : 0.0,
                                                    estimate_probability(ctx.dist, k, ctx.z)));
                   }
                   return refs;
                 }});
    d.push_back(bertrand_def("bertrand-endpoints", sc::BertrandMethod::Endpoints,
                             "chord through two independent uniform points on the unit circle"));
    d.push_back(bertrand_def("bertrand-radial", sc::BertrandMethod::RadialMidpoint,
                             "chord whose midpoint is uniform along a uniformly oriented radius"));
    d.push_back(bertrand_def("bertrand-disk", sc::BertrandMethod::DiskMidpoint,
                             "chord whose midpoint is uniform over the disk area"));
    d.push_back({"cube-factory",
                 "iron cubes with Gaussian edge length truncated to [0, 2] cm",
                 {{"mean", "1", "mean edge length, cm"},
                  {"sigma", "0.25", "standard deviation of the edge length, cm"},
                  {"bins", "64", "cells of the edge-length histogram"},
                  {"thresholds", "0.75,1,2", "t values for the P(x <= t) reference checks"}},
                 [](const ParamReader& p) { return sc::make_cube_factory(cube_spec(p), bins_of(p)); },
                 [](const RunContext& ctx) {
                   const auto spec = cube_spec(ctx.params);
                   json refs = json::array();
                   for (double t : ctx.params.reals("thresholds")) {
                     char name[64];
                     std::snprintf(name, sizeof name, "x<=%g", t);
                     refs.push_back(reference_entry(name, sc::cube_cdf(spec, t), sc::cube_below(ctx.records, t, ctx.z)));
                   }
                   return refs;
                 }});
    d.push_back({"bus-bob",
                 "bus stop watched by someone who only knows there is one bus per cycle",
                 {{"cycle", "60", "minutes between buses"}, {"window", "5", "minutes one is willing to wait"}},
                 [](const ParamReader& p) { return sc::make_bus_scenario(bus_spec(p, sc::BusProber::WindowWatcher)); },
                 [](const RunContext& ctx) { return bus_references(ctx, false); }});
    d.push_back({"bus-alice",
                 "same bus line probed from a tower that sees the bus position",
                 {{"cycle", "60", "minutes between buses"}, {"window", "5", "minutes one is willing to wait"}},
                 [](const ParamReader& p) { return sc::make_bus_scenario(bus_spec(p, sc::BusProber::TowerObserver)); },
                 [](const RunContext& ctx) { return bus_references(ctx, true); }});
    d.push_back({"camera-die",
                 "fair die whose prober also films the die just before it settles",
                 {},
                 [](const ParamReader&) { return sc::make_camera_die(); },
                 camera_references});
    d.push_back({"sunday-walk",
                 "duration of Sunday walks: plateau, then decline with age",
                 {{"trend", "1", "1 = plateau then decline, 0 = flat"},
                  {"horizon", "n", "trials spanning the whole life trend (default: n)"},
                  {"bins", "64", "cells of the duration histogram on [0, 240] min"}},
                 [](const ParamReader& p) {
                   sc::WalkSpec spec;
                   spec.trend = p.flag("trend");
                   spec.horizon = p.natural("horizon");
                   return sc::make_nonstationary_walk(spec, bins_of(p));
                 },
                 no_references});
    return d;
  }();
  return defs;
}

const ScenarioDef& find_def(const std::string& id) {
  for (const auto& d : registry()) {
    if (d.id == id) return d;
  }
  throw ConfigError("unknown scenario '" + id + "' (see --list)");
}

// Scenario-level invalid arguments are configuration errors.
template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// report pieces

json verdict_json(const StabilizationVerdict& v, const OutcomeSpace& space) {
  if (const auto* s = std::get_if<Stabilizing>(&v)) {
    return {{"kind", "stabilizing"},
            {"n_used", s->n_used},
            {"estimates", s->estimates},
            {"half_widths", s->half_widths}};
  }
  if (const auto* s = std::get_if<NonStabilizing>(&v)) {
    return {{"kind", "non-stabilizing"},
            {"entry", space.labels()[s->entry]},
            {"entry_index", s->entry},
            {"block", s->block},
            {"block_frequency", s->block_frequency},
            {"pooled_frequency", s->pooled_frequency},
            {"deviation", s->deviation},
            {"allowance", s->allowance}};
  }
  const auto& s = std::get<Inconclusive>(v);
  return {{"kind", "inconclusive"}, {"n", s.n}, {"min_n", s.min_n}};
}

json config_echo(const ExperimentConfig& c, const json& params) {
  json events = json::array();
  for (const auto& e : c.events) events.push_back(e);
  return {{"scenario", c.scenario},
          {"params", params},
          {"n", c.n},
          {"seed", c.seed},
          {"stabilization",
           {{"blocks", c.stabilization.blocks},
            {"burn_in", c.stabilization.burn_in},
            {"z", c.stabilization.z},
            {"eps_abs", c.stabilization.eps_abs},
            {"min_n", c.stabilization.min_n}}},
          {"predictor", {{"order", c.predictor.order}, {"train_fraction", c.predictor.train_fraction}}},
          {"events", events}};
}

bool is_natural(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t event_natural(const json& d, const char* key, std::optional<std::size_t> fallback = std::nullopt) {
  if (!d.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("event descriptor needs '") + key + "'");
  }
  const auto& v = d.at(key);
  if (!is_natural(v)) throw ConfigError(std::string("event field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  find_def(scenario);
  if (n == 0) throw ConfigError("n must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (format != "json" && format != "text") throw ConfigError("format must be 'json' or 'text'");
  as_config_error([&] {
    stabilization.validate();
    predictor.validate();
    return 0;
  });
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"scenario", "params", "n",      "seed",   "stabilization", "predictor",
                                                 "events",   "out",    "trace",  "workers", "format",       "timing"};
  for (const auto& [k, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  }
  ExperimentConfig c;
  try {
    if (doc.contains("scenario")) c.scenario = doc.at("scenario").get<std::string>();
    if (doc.contains("params")) {
      for (const auto& [k, v] : doc.at("params").items()) {
        if (v.is_string()) {
          c.params[k] = v.get<std::string>();
        } else if (v.is_boolean()) {
          c.params[k] = v.get<bool>() ? "1" : "0";
        } else if (v.is_number()) {
          c.params[k] = v.dump();
        } else {
          throw ConfigError("parameter '" + k + "' must be a string, number or boolean");
        }
      }
    }
    if (doc.contains("n")) c.n = doc.at("n").get<std::uint64_t>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("stabilization")) {
      const auto& s = doc.at("stabilization");
      for (const auto& [k, v] : s.items()) {
        if (k == "blocks") c.stabilization.blocks = v.get<std::size_t>();
        else if (k == "burn_in") c.stabilization.burn_in = v.get<double>();
        else if (k == "z") c.stabilization.z = v.get<double>();
        else if (k == "eps_abs") c.stabilization.eps_abs = v.get<double>();
        else if (k == "min_n") c.stabilization.min_n = v.get<std::size_t>();
        else throw ConfigError("unknown stabilization key '" + k + "'");
      }
    }
    if (doc.contains("predictor")) {
      for (const auto& [k, v] : doc.at("predictor").items()) {
        if (k == "order") c.predictor.order = v.get<std::size_t>();
        else if (k == "train_fraction") c.predictor.train_fraction = v.get<double>();
        else throw ConfigError("unknown predictor key '" + k + "'");
      }
    }
    if (doc.contains("events")) {
      for (const auto& e : doc.at("events")) c.events.push_back(e);
    }
    if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
    if (doc.contains("trace")) c.trace = doc.at("trace").get<std::string>();
    if (doc.contains("workers")) c.workers = doc.at("workers").get<unsigned>();
    if (doc.contains("format")) c.format = doc.at("format").get<std::string>();
    if (doc.contains("timing")) c.timing = doc.at("timing").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::vector<CatalogEntry> list_scenarios() {
  std::vector<CatalogEntry> out;
  for (const auto& d : registry()) {
    const ParamReader defaults(d.id, d.params, {}, 100000);
    const auto sys = d.build(defaults);
    out.push_back({d.id, d.summary, sys.object().name, sys.initializer().name, sys.prober().name, d.params});
  }
  return out;
}

json catalog_json() {
  json entries = json::array();
  for (const auto& e : list_scenarios()) {
    json params = json::array();
    for (const auto& p : e.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"doc", p.doc}});
    entries.push_back({{"id", e.id},
                       {"summary", e.summary},
                       {"object", e.object},
                       {"initializer", e.initializer},
                       {"prober", e.prober},
                       {"params", params}});
  }
  return {{"schema", kCatalogSchema}, {"scenarios", entries}};
}

void write_catalog_text(std::ostream& os) {
  for (const auto& e : list_scenarios()) {
    os << e.id << "\n"
       << "  " << e.summary << "\n"
       << "  object:      " << e.object << "\n"
       << "  initializer: " << e.initializer << "\n"
       << "  prober:      " << e.prober << "\n";
    for (const auto& p : e.params) {
      os << "  --param " << p.name << "=<" << p.default_value << ">  " << p.doc << "\n";
    }
  }
}

RhoSystem build_scenario(const std::string& id, const Params& params, std::uint64_t n) {
  const auto& def = find_def(id);
  const ParamReader reader(id, def.params, params, n);
  return as_config_error([&] { return def.build(reader); });
}

ParsedEvent parse_event(const json& d, std::optional<std::size_t> default_J) {
  if (!d.is_object() || !d.contains("kind") || !d.at("kind").is_string()) {
    throw ConfigError("event descriptor needs a string 'kind'");
  }
  const auto kind = d.at("kind").get<std::string>();
  static const std::map<std::string, std::vector<std::string>> fields = {
      {"any_of", {"kind", "outcomes", "J"}},
      {"at_least", {"kind", "outcome", "count", "length", "J"}},
      {"exactly", {"kind", "outcome", "count", "length", "J"}},
      {"run", {"kind", "outcome", "count", "length", "J"}},
      {"always", {"kind", "length", "J"}}};
  const auto it = fields.find(kind);
  if (it == fields.end()) throw ConfigError("unknown event kind '" + kind + "'");
  for (const auto& [k, _] : d.items()) {
    if (std::find(it->second.begin(), it->second.end(), k) == it->second.end()) {
      throw ConfigError("event kind '" + kind + "' has no field '" + k + "'");
    }
  }

  ParsedEvent out;
  if (!d.contains("J") && !default_J) throw ConfigError("event descriptor needs 'J' for a continuous scenario");
  out.J = event_natural(d, "J", default_J);
  if (out.J == 0) throw ConfigError("event 'J' must be >= 1");
  auto outcome_ok = [&](std::size_t o) {
    if (o >= out.J) throw ConfigError("event outcome " + std::to_string(o) + " outside [0, J)");
    return o;
  };

  if (kind == "any_of") {
    if (!d.contains("outcomes") || !d.at("outcomes").is_array()) throw ConfigError("any_of needs an 'outcomes' array");
    std::vector<std::size_t> outcomes;
    for (const auto& v : d.at("outcomes")) {
      if (!is_natural(v)) throw ConfigError("any_of outcomes must be non-negative integers");
      outcomes.push_back(outcome_ok(v.get<std::size_t>()));
    }
    out.event = cl::any_of(std::move(outcomes));
  } else if (kind == "always") {
    out.event = cl::always(event_natural(d, "length", 1));
  } else {
    const auto outcome = outcome_ok(event_natural(d, "outcome"));
    const auto count = event_natural(d, "count");
    const auto length = event_natural(d, "length");
    if (kind == "at_least") out.event = cl::at_least(outcome, count, length);
    else if (kind == "exactly") out.event = cl::exactly(outcome, count, length);
    else out.event = cl::run_of(outcome, count, length);
  }
  if (out.event.length == 0) throw ConfigError("event 'length' must be >= 1");
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const auto& def = find_def(config.scenario);
  const ParamReader params(def.id, def.params, config.params, config.n);
  const RhoSystem system = as_config_error([&] { return def.build(params); });
  const OutcomeSpace& space = system.space();

  std::vector<ParsedEvent> events;
  const std::optional<std::size_t> default_J =
      space.is_discrete() ? std::optional<std::size_t>(space.size()) : std::nullopt;
  for (const auto& e : config.events) events.push_back(parse_event(e, default_J));

  const SeedSpec seeds{config.seed};
  const double z = config.stabilization.z;

  std::vector<TrialRecord> records;
  try {
    records = run_trials(system, config.n, seeds, config.workers);
  } catch (const Error& e) {
    throw ScenarioError(e.what());
  }

  json report;
  report["schema"] = kReportSchema;
  report["config"] = config_echo(config, params.effective());
  report["system"] = {{"descriptor", system.descriptor()},
                      {"object", system.object().name},
                      {"initializer", system.initializer().name},
                      {"prober", system.prober().name}};

  try {
    const auto dist = relative_frequencies(records, space);
    json distribution = {{"kind", space.is_discrete() ? "discrete" : "continuous"},
                         {"labels", space.labels()},
                         {"n", dist.n()},
                         {"counts", dist.counts()},
                         {"frequencies", dist.frequencies()}};
    if (!space.is_discrete()) {
      const auto density = estimate_density(dist);
      std::vector<double> heights(density.cells());
      for (std::size_t k = 0; k < density.cells(); ++k) heights[k] = density.height(k);
      distribution["lo"] = space.lo();
      distribution["hi"] = space.hi();
      distribution["cell_width"] = space.cell_width();
      distribution["density_heights"] = heights;
    }
    report["distribution"] = std::move(distribution);

    json estimates = json::array();
    for (std::size_t j = 0; j < space.size(); ++j) {
      const auto est = estimate_probability(dist, j, z);
      estimates.push_back({{"label", space.labels()[j]}, {"p", est.p}, {"half_width", est.half_width}});
    }
    report["estimates"] = std::move(estimates);

    try {
      const auto c = classify(records, space, config.stabilization, config.predictor);
      report["verdict"] = verdict_json(c.verdict, space);
      json cls = {{"class", to_string(c.cls)}};
      if (c.accuracy) {
        cls["predictor_accuracy"] = *c.accuracy;
        cls["baseline"] = c.baseline;
        cls["threshold"] = c.threshold;
      }
      report["classification"] = std::move(cls);
    } catch (const InconclusiveInput& e) {
      report["verdict"] = verdict_json(test_stabilization(records, space, config.stabilization), space);
      report["classification"] = {{"class", nullptr}, {"reason", e.what()}};
    } catch (const TooFewRecords& e) {
      report["verdict"] = verdict_json(test_stabilization(records, space, config.stabilization), space);
      report["classification"] = {{"class", nullptr}, {"reason", e.what()}};
    }

    report["references"] = def.references(RunContext{params, records, dist, z});

    json classical = json::array();
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& ev = events[i];
      const cl::EquiprobableSpace eq(ev.J);
      // Each event gets its own stream family, independent of the scenario's.
      const SeedSpec event_seeds{mix64(config.seed + 0x5eed0000ULL + i)};
      const auto a = cl::check_frequentist_agreement(eq, ev.event, config.n, event_seeds, config.workers, z);
      classical.push_back({{"event", config.events[i]},
                           {"J", ev.J},
                           {"exact", std::to_string(a.exact.numerator()) + "/" + std::to_string(a.exact.denominator())},
                           {"exact_value", cl::to_double(a.exact)},
                           {"estimate", a.estimate},
                           {"half_width", a.half_width},
                           {"agrees", a.agrees}});
    }
    report["classical"] = std::move(classical);
  } catch (const ConfigError&) {
    throw;
  } catch (const EnumerationTooLarge& e) {
    throw ConfigError(e.what());
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(e.what());
  }

  ExperimentResult result;
  if (!config.trace.empty()) {
    const auto checkpoints = geometric_checkpoints(records.size(), config.stabilization.min_n);
    result.trace = frequency_trace(records, space, checkpoints);
  }
  if (config.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = {{"wall_seconds", secs}};
  }
  result.report = std::move(report);
  return result;
}

namespace {

std::string fmt_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string render_report(const json& r, const std::string& format) {
  if (format == "json") return r.dump(2) + "\n";
  std::ostringstream os;
  const auto& c = r.at("config");
  os << "scenario     " << c.at("scenario").get<std::string>() << "  (" << r.at("system").at("descriptor").get<std::string>()
     << ")\n";
  os << "trials       " << c.at("n").get<std::uint64_t>() << "  seed " << c.at("seed").get<std::uint64_t>() << "\n";
  os << "object       " << r.at("system").at("object").get<std::string>() << "\n";
  os << "initializer  " << r.at("system").at("initializer").get<std::string>() << "\n";
  os << "prober       " << r.at("system").at("prober").get<std::string>() << "\n";
  const auto& v = r.at("verdict");
  os << "verdict      " << v.at("kind").get<std::string>();
  if (v.at("kind") == "non-stabilizing") {
    os << "  (entry " << v.at("entry").get<std::string>() << ", block " << v.at("block").get<std::size_t>()
       << ", deviation " << fmt_real(v.at("deviation").get<double>()) << " > allowance "
       << fmt_real(v.at("allowance").get<double>()) << ")";
  }
  os << "\n";
  const auto& cls = r.at("classification").at("class");
  os << "class        " << (cls.is_null() ? std::string("(none)") : cls.get<std::string>()) << "\n";
  os << "estimates\n";
  for (const auto& e : r.at("estimates")) {
    if (e.at("p").get<double>() == 0.0 && r.at("distribution").at("kind") == "continuous") continue;
    os << "  " << e.at("label").get<std::string>() << "  " << fmt_real(e.at("p").get<double>()) << " +- "
       << fmt_real(e.at("half_width").get<double>()) << "\n";
  }
  if (!r.at("references").empty()) {
    os << "references\n";
    for (const auto& e : r.at("references")) {
      os << "  " << e.at("event").get<std::string>() << "  reference " << fmt_real(e.at("reference").get<double>())
         << "  estimate " << fmt_real(e.at("estimate").get<double>()) << " +- "
         << fmt_real(e.at("half_width").get<double>()) << "  " << (e.at("agrees").get<bool>() ? "agrees" : "DISAGREES")
         << "\n";
    }
  }
  if (!r.at("classical").empty()) {
    os << "classical\n";
    for (const auto& e : r.at("classical")) {
      os << "  " << e.at("event").dump() << "  exact " << e.at("exact").get<std::string>() << "  estimate "
         << fmt_real(e.at("estimate").get<double>()) << " +- " << fmt_real(e.at("half_width").get<double>()) << "  "
         << (e.at("agrees").get<bool>() ? "agrees" : "DISAGREES") << "\n";
    }
  }
  if (r.contains("timing")) os << "wall time    " << fmt_real(r.at("timing").at("wall_seconds").get<double>()) << " s\n";
  return os.str();
}

std::string render_trace(const FrequencyTrace& trace) {
  std::ostringstream os;
  trace.write_csv(os);
  return os.str();
}

json run_and_write(const ExperimentConfig& config, std::ostream& os) {
  auto result = run_experiment(config);
  const auto text = render_report(result.report, config.format);
  if (config.out.empty()) {
    os << text;
  } else {
    std::ofstream f(config.out, std::ios::binary);
    if (!f || !(f << text) || !f.flush()) throw IoError("cannot write report '" + config.out + "'");
  }
  if (result.trace) {
    std::ofstream f(config.trace, std::ios::binary);
    if (!f || !(f << render_trace(*result.trace)) || !f.flush()) throw IoError("cannot write trace '" + config.trace + "'");
  }
  return result.report;
}

}  // namespace rho::experiment
