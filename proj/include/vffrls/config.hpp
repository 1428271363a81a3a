#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenario.hpp"

// JSON experiment files and the built-in figure presets.
//
// A file holds either one case object or {"cases": [case, ...]}. A case is a scenario object
// (keys named after ScenarioConfig fields) plus optional "label", "sweep": {"axis", "values"}
// and "analytical".

namespace vffrls {

inline constexpr char kVersion[] = "0.1.0";

struct ExperimentCase
{
  std::string         label;
  ScenarioConfig      config;
  std::optional<std::string> sweep_axis;
  std::vector<double> sweep_values;
  bool                analytical = false; // append predictions from the analysis module
};

struct Preset
{
  std::string                 name;
  std::string                 description;
  std::vector<ExperimentCase> cases;
  std::vector<std::string>    assumed; // parameters the source leaves open, filled from defaults
};

std::vector<std::string> preset_names();

// Throws ConfigError for an unknown name.
Preset find_preset(std::string_view name);

std::string to_json(ScenarioConfig const &config, int indent = 2);
std::string to_json(std::vector<ExperimentCase> const &cases, int indent = 2);

// Parses and validates; throws ConfigError with every problem found.
std::vector<ExperimentCase> parse_experiment(std::string_view text);
std::vector<ExperimentCase> load_experiment(std::filesystem::path const &path);

} // namespace vffrls
