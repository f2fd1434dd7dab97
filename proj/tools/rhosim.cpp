// rhosim: config-driven runner for the scenario catalog.
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
// 3 scenario failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rho/experiment.hpp"

namespace ex = rho::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Run partitioned probabilistic systems and test their frequency stabilization"};

  std::string config_path;
  std::string scenario;
  std::vector<std::string> params;
  std::vector<std::string> events;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::size_t blocks = 0;
  double z = 0.0;
  double eps_abs = 0.0;
  std::string out;
  std::string trace;
  unsigned workers = 1;
  std::string format;
  bool list = false;
  bool timing = false;

  app.add_option("--config", config_path, "JSON experiment config; flags override its values");
  auto* o_scenario = app.add_option("--scenario", scenario, "scenario id (see --list)");
  app.add_option("--param", params, "scenario parameter k=v (repeatable)");
  app.add_option("--event", events, "composed-event descriptor as JSON (repeatable)");
  auto* o_n = app.add_option("--n", n, "number of trials");
  auto* o_seed = app.add_option("--seed", seed, "master seed (u64)");
  auto* o_blocks = app.add_option("--blocks", blocks, "blocks of the stabilization test");
  auto* o_z = app.add_option("--z", z, "allowance multiplier of the stabilization test");
  auto* o_eps = app.add_option("--eps-abs", eps_abs, "absolute precision target");
  auto* o_out = app.add_option("--out", out, "report path (default: stdout)");
  auto* o_trace = app.add_option("--trace", trace, "CSV convergence trace path");
  auto* o_workers = app.add_option("--workers", workers, "worker threads");
  auto* o_format = app.add_option("--format", format, "report format: json or text");
  app.add_flag("--list", list, "list the scenario catalog and exit");
  auto* o_timing = app.add_flag("--timing", timing, "add wall-clock timing to the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "rhosim: " << e.what() << "\n";
    return 2;
  }

  try {
    if (list) {
      if (format == "json") {
        std::cout << ex::catalog_json().dump(2) << "\n";
      } else if (format.empty() || format == "text") {
        ex::write_catalog_text(std::cout);
      } else {
        throw ex::ConfigError("format must be 'json' or 'text'");
      }
      return 0;
    }

    ex::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ex::load_config(config_path);
    if (o_scenario->count()) cfg.scenario = scenario;
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ex::ConfigError("--param expects k=v, got '" + kv + "'");
      cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    for (const auto& e : events) {
      try {
        cfg.events.push_back(ex::json::parse(e));
      } catch (const ex::json::parse_error&) {
        throw ex::ConfigError("--event is not valid JSON: " + e);
      }
    }
    if (o_n->count()) cfg.n = n;
    if (o_seed->count()) cfg.seed = seed;
    if (o_blocks->count()) cfg.stabilization.blocks = blocks;
    if (o_z->count()) cfg.stabilization.z = z;
    if (o_eps->count()) cfg.stabilization.eps_abs = eps_abs;
    if (o_out->count()) cfg.out = out;
    if (o_trace->count()) cfg.trace = trace;
    if (o_workers->count()) cfg.workers = workers;
    if (o_format->count()) cfg.format = format;
    if (o_timing->count()) cfg.timing = timing;
    if (cfg.scenario.empty()) throw ex::ConfigError("no scenario given (use --scenario or --list)");

    ex::run_and_write(cfg, std::cout);
    return 0;
  } catch (const ex::ConfigError& e) {
    std::cerr << "rhosim: config error: " << e.what() << "\n";
    return 2;
  } catch (const ex::IoError& e) {
    std::cerr << "rhosim: i/o error: " << e.what() << "\n";
    return 1;
  } catch (const rho::Error& e) {
    std::cerr << "rhosim: scenario error: " << e.what() << "\n";
    return 3;
  }
}
