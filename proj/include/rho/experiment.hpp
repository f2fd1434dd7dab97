#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rho/classical.hpp"
#include "rho/core.hpp"
#include "rho/stats.hpp"

namespace rho::experiment {

using nlohmann::json;

inline constexpr const char* kReportSchema = "rhoprob.report/1";
inline constexpr const char* kCatalogSchema = "rhoprob.catalog/1";

/// Invalid configuration (unknown scenario, bad parameter, out-of-range
/// knob). CLI exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Failure while running a scenario. CLI exit code 3.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed. CLI exit code 1.
class IoError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  std::string scenario;
  std::map<std::string, std::string> params;
  std::uint64_t n = 100000;
  std::uint64_t seed = 42;
  StabilizationConfig stabilization;
  PredictorConfig predictor;
  /// Composed-event descriptors checked against their classical values.
  std::vector<json> events;
  std::string out;
  std::string trace;
  unsigned workers = 1;
  /// "json" or "text".
  std::string format = "json";
  /// Adds wall-clock timing to the report (breaks byte-identity across runs).
  bool timing = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a config document. Unknown keys are rejected.
ExperimentConfig config_from_json(const json& doc);
ExperimentConfig load_config(const std::string& path);

struct ParamDoc {
  std::string name;
  std::string default_value;
  std::string doc;
};

struct CatalogEntry {
  std::string id;
  std::string summary;
  std::string object;
  std::string initializer;
  std::string prober;
  std::vector<ParamDoc> params;
};

/// All cataloged scenarios, in a fixed order.
std::vector<CatalogEntry> list_scenarios();
json catalog_json();
void write_catalog_text(std::ostream& os);

/// Builds the scenario's system from its id and parameters (defaults filled
/// from the catalog). `n` is the planned run length, used as the default
/// drift horizon. Throws ConfigError.
RhoSystem build_scenario(const std::string& id, const std::map<std::string, std::string>& params,
                         std::uint64_t n);

struct ParsedEvent {
  std::size_t J = 0;
  classical::ComposedEvent event;
};

/// Composed event from a closed descriptor, e.g.
/// {"kind":"at_least","outcome":5,"count":1,"length":4}. Kinds: any_of,
/// at_least, exactly, run, always. "J" defaults to `default_J`. Throws
/// ConfigError.
ParsedEvent parse_event(const json& descriptor, std::optional<std::size_t> default_J);

struct ExperimentResult {
  json report;
  std::optional<FrequencyTrace> trace;
};

/// Runs the whole pipeline: trials, distribution, stabilization verdict,
/// classification, estimates, reference checks. Pure in the config (apart
/// from the optional timing block). Does not touch the filesystem.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// run_experiment plus writing the report (to `out`, or `os` when empty) and
/// the trace (when `trace` is set).
json run_and_write(const ExperimentConfig& config, std::ostream& os);

/// Serializations used on disk.
std::string render_report(const json& report, const std::string& format);
std::string render_trace(const FrequencyTrace& trace);

}  // namespace rho::experiment
