#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fogalloc/experiments.hpp"

namespace fogalloc {

/// Malformed or inconsistent configuration. The message starts with
/// "<source>:<line>:<column>:" whenever a position is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

/// Everything a CLI invocation needs. Omitted fields keep their defaults.
struct Config {
  ExperimentConfig experiment;  // scenario, method and solver parameters, grids, seed, jobs
  std::string method = "both";  // local | dc | two-step | both
  std::string csv_path;         // empty: stdout
  std::string summary_path;     // empty: no summary file

  friend bool operator==(const Config&, const Config&) = default;
};

/// Parses the JSON config schema. Unknown keys are errors. Noise power is the
/// only quantity given in dBm; scenarios carry it in watts.
Config parse_config(std::string_view text, std::string_view source = "<config>");
Config load_config(const std::filesystem::path& path);

/// Full config with every field written out; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& c);

/// Throws ConfigError unless `name` is one of local, dc, two-step, both.
void validate_method_name(std::string_view name);

/// Sets the method name and the experiment method list it implies. The local
/// baseline is always part of a sweep since ratios are taken against it.
void set_method(Config& c, std::string_view name);

}  // namespace fogalloc
