#pragma once

#include "jdtc/estimation.hpp"
#include "jdtc/metrics.hpp"
#include "jdtc/phd_filter.hpp"
#include "jdtc/scenario.hpp"
#include "jdtc/smoother.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace jdtc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything one filter-vs-smoother run needs.
struct ExperimentConfig {
  ScenarioConfig scenario;
  FilterConfig filter;
  SmootherConfig smoother;
  bool smoother_enabled = true;
  ExtractionConfig extraction;
  OspaParams ospa;
  /// Inclusive scan range used for headline numbers.
  int window_first = 10;
  int window_last = 55;

  void validate() const;
};

/// Parses the YAML experiment file. Classes and targets use one-based labels,
/// SNR bands are in dB. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& yaml);
ExperimentConfig load_config(const std::filesystem::path& path);

/// YAML that parses back to the same configuration.
std::string emit_config(const ExperimentConfig& cfg);

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> lag;
  std::optional<int> particles;
  std::optional<double> clutter_rate;
  std::optional<double> gate_radius;
  bool no_smoother = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& overrides);

}  // namespace jdtc
