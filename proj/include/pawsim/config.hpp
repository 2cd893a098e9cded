#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pawsim/controller.hpp"
#include "pawsim/simulator.hpp"

namespace pawsim {

class ConfigParseError : public std::runtime_error
{
public:
  ConfigParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
  {
  }
  int line() const { return line_; }

private:
  int line_;
};

class ConfigValidationError : public std::runtime_error
{
public:
  ConfigValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field))
  {
  }
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Values that fill a command when a client or scenario leaves fields out.
struct GaitDefaults
{
  double cycle_period = 0.8;        ///< trot
  double walk_cycle_period = 1.6;
  double swing_height = 0.04;
  double stance_depth = 0.0;
  double body_height = 0.17;

  double period_for(GaitPattern pattern) const
  {
    return pattern == GaitPattern::Walk ? walk_cycle_period : cycle_period;
  }
  /// Default command: start and walk off, zero steps, default height and period.
  TeleopCommand command() const;
};

struct SimulationSettings
{
  double dt = 0.01;
  double contact_epsilon = 1e-4;
};

struct ServerSettings
{
  int port = 8765;
  double state_rate_hz = 30.0;
};

/// Lower-leg spring damper. Loaded and validated, not simulated.
struct DamperSettings
{
  double threshold_force = 148.0;       ///< N
  double displacement_ratio = 0.1e-3;   ///< m/N
  double max_displacement = 0.010;      ///< m
};

struct Config
{
  ControllerConfig controller;
  GaitDefaults gait_defaults;
  ServoParams servo;
  SimulationSettings simulation;
  ServerSettings server;
  DamperSettings damper;

  const RobotGeometry& geometry() const { return controller.geometry; }
  SimulatorConfig simulator_config() const;
  double control_dt() const { return 1.0 / controller.rate_hz; }
  /// Simulator steps per control tick.
  int substeps() const;

  /// Throws ConfigValidationError naming the first offending field.
  void validate() const;
};

/// Built-in defaults, identical to the shipped config/default.toml.
Config default_config();

/// Parses a TOML-style document: [section] headers, key = value lines with numbers, booleans,
/// "strings" and [number, ...] arrays, # comments. Absent keys keep their defaults; unknown
/// keys are a parse error.
Config parse_config(std::string_view text);

/// Throws IoError when the file cannot be read.
Config load_config(const std::filesystem::path& path);

/// Serializes every key, in the same format parse_config reads.
std::string render_config(const Config& config);

}  // namespace pawsim
