#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pawsim/config.hpp"
#include "pawsim/loop.hpp"

namespace pawsim {

struct Keyframe
{
  double time = 0.0;  ///< s, command takes effect on the first tick starting at or after it
  TeleopCommand command;
};

struct Scenario
{
  double duration = 0.0;  ///< s
  std::vector<Keyframe> keyframes;

  /// Throws std::invalid_argument: times must be non-negative and strictly increasing, and
  /// duration at least the last keyframe time.
  void validate() const;
};

/// JSON: {"duration": s, "keyframes": [{"time": s, "command": {...}}, ...]}. The command
/// object has the cmd message layout; absent fields take the config defaults.
Scenario parse_scenario(std::string_view json_text, const GaitDefaults& defaults = {});
Scenario load_scenario(const std::filesystem::path& path, const GaitDefaults& defaults = {});

struct ScenarioSummary
{
  std::uint64_t ticks = 0;
  double distance = 0.0;  ///< m, odometry path length
  std::optional<double> min_com_margin;
  std::uint64_t ik_failures = 0;  ///< per-leg IK failures summed over ticks
  int min_stance_feet = 4;
};

/// Header row of the telemetry CSV.
std::string csv_header();
/// One CSV row for a tick sample, time given by the caller.
std::string csv_row(double time, const TickSample& sample);

/// Runs the closed loop headless for round(duration * rate) ticks and writes one CSV row per
/// tick. Throws IoError when the output cannot be written.
ScenarioSummary run_scenario(const Config& config, const Scenario& scenario, std::ostream& out);
ScenarioSummary run_scenario(const Config& config, const Scenario& scenario,
                             const std::filesystem::path& out_path);

}  // namespace pawsim
