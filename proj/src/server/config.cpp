#include "pawsim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "keyvalue.hpp"

namespace pawsim {

namespace {

using Reader = std::function<void(const kv::Entry&, const std::string&)>;
using Writer = std::function<std::string()>;

struct Field
{
  std::string key;
  Reader read;
  Writer write;
};

double as_number(const kv::Entry& e, const std::string& key)
{
  if (const double* v = std::get_if<double>(&e.value)) return *v;
  throw ConfigParseError(e.line, key + ": expected a number");
}

Field number(std::string key, double& target)
{
  return {std::move(key), [&target](const kv::Entry& e, const std::string& k) { target = as_number(e, k); },
          [&target] { return fmt::format("{}", target); }};
}

Field degrees(std::string key, double& radians)
{
  return {std::move(key),
          [&radians](const kv::Entry& e, const std::string& k) { radians = deg2rad(as_number(e, k)); },
          [&radians] { return fmt::format("{}", rad2deg(radians)); }};
}

Field integer(std::string key, int& target)
{
  return {std::move(key),
          [&target](const kv::Entry& e, const std::string& k) {
            const double v = as_number(e, k);
            if (v != std::floor(v) || std::abs(v) > 1e9) {
              throw ConfigParseError(e.line, k + ": expected an integer");
            }
            target = static_cast<int>(v);
          },
          [&target] { return fmt::format("{}", target); }};
}

Field vector3(std::string key, Vec3& target)
{
  return {std::move(key),
          [&target](const kv::Entry& e, const std::string& k) {
            const auto* v = std::get_if<std::vector<double>>(&e.value);
            if (v == nullptr || v->size() != 3) {
              throw ConfigParseError(e.line, k + ": expected [x, y, z]");
            }
            target = {(*v)[0], (*v)[1], (*v)[2]};
          },
          [&target] { return fmt::format("[{}, {}, {}]", target.x(), target.y(), target.z()); }};
}

std::vector<std::pair<std::string, std::vector<Field>>> schema(Config& c)
{
  ControllerConfig& ctl = c.controller;
  LegGeometry& leg = ctl.geometry.leg;
  auto& m = ctl.geometry.mounts;
  return {
      {"geometry",
       {number("l_hip", leg.l_hip), number("l_upper", leg.l_upper), number("l_lower", leg.l_lower),
        degrees("hip_min_deg", leg.hip_limits.lo), degrees("hip_max_deg", leg.hip_limits.hi),
        degrees("upper_min_deg", leg.upper_limits.lo), degrees("upper_max_deg", leg.upper_limits.hi),
        degrees("lower_min_deg", leg.lower_limits.lo), degrees("lower_max_deg", leg.lower_limits.hi)}},
      {"mounts",
       {vector3("fl", m[index(LegId::FL)]), vector3("fr", m[index(LegId::FR)]),
        vector3("bl", m[index(LegId::BL)]), vector3("br", m[index(LegId::BR)])}},
      {"body",
       {number("height", c.gait_defaults.body_height), number("sit_height", ctl.sit_height),
        number("min_height", ctl.limits.height.lo), number("max_height", ctl.limits.height.hi),
        degrees("max_roll_deg", ctl.limits.max_roll), degrees("max_pitch_deg", ctl.limits.max_pitch),
        degrees("max_yaw_deg", ctl.limits.max_yaw)}},
      {"gait",
       {number("cycle_period", c.gait_defaults.cycle_period),
        number("walk_cycle_period", c.gait_defaults.walk_cycle_period),
        number("swing_height", c.gait_defaults.swing_height),
        number("stance_depth", c.gait_defaults.stance_depth), number("walk_duty", ctl.gait.walk_duty),
        number("walk_lean", ctl.gait.walk_lean), number("lean_ramp", ctl.gait.lean_ramp),
        number("lean_full_height", ctl.gait.lean_full_height)}},
      {"limits",
       {number("max_step_x", ctl.limits.gait.max_step_x),
        number("max_step_y", ctl.limits.gait.max_step_y),
        number("max_swing_height", ctl.limits.gait.max_swing_height),
        number("max_stance_depth", ctl.limits.gait.max_stance_depth),
        number("min_cycle_period", ctl.limits.gait.min_cycle_period),
        number("max_cycle_period", ctl.limits.gait.max_cycle_period)}},
      {"controller",
       {number("rate_hz", ctl.rate_hz), number("ramp_time", ctl.ramp_time),
        number("gait_ramp_time", ctl.gait_ramp_time), number("max_joint_speed", ctl.max_joint_speed),
        number("height_rate", ctl.rates.height), degrees("angle_rate_deg", ctl.rates.angle),
        number("step_rate", ctl.rates.step), number("period_rate", ctl.rates.cycle_period)}},
      {"servo", {number("max_speed", c.servo.max_speed), number("max_torque", c.servo.max_torque)}},
      {"simulation",
       {number("dt", c.simulation.dt), number("contact_epsilon", c.simulation.contact_epsilon)}},
      {"server", {integer("port", c.server.port), number("state_rate_hz", c.server.state_rate_hz)}},
      {"damper",
       {number("threshold_force", c.damper.threshold_force),
        number("displacement_ratio", c.damper.displacement_ratio),
        number("max_displacement", c.damper.max_displacement)}},
  };
}

void positive(const char* field, double v)
{
  if (!std::isfinite(v) || !(v > 0.0)) throw ConfigValidationError(field, "must be positive");
}

void within(const char* field, double v, double lo, double hi)
{
  if (!(v >= lo && v <= hi)) {
    throw ConfigValidationError(field, fmt::format("must lie in [{}, {}]", lo, hi));
  }
}

void ordered(const char* lo_field, const char* hi_field, double lo, double hi)
{
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigValidationError(lo_field, fmt::format("must be below {}", hi_field));
  }
}

void standable(const char* field, double height, const RobotGeometry& geometry)
{
  const BodyIkResult r = body_ik(BodyPose{height}, geometry.neutral_stance(), geometry);
  if (!r.feasible()) {
    throw ConfigValidationError(
        field, fmt::format("neutral stance at {} m is not solvable for leg {}", height,
                           to_string(*r.infeasible_leg)));
  }
}

}  // namespace

TeleopCommand GaitDefaults::command() const
{
  TeleopCommand c;
  c.gait.swing_height = swing_height;
  c.gait.stance_depth = stance_depth;
  c.gait.cycle_period = period_for(c.gait.pattern);
  c.body.height = body_height;
  return c;
}

SimulatorConfig Config::simulator_config() const
{
  SimulatorConfig s;
  s.geometry = controller.geometry;
  s.servo = servo;
  s.contact_epsilon = simulation.contact_epsilon;
  return s;
}

int Config::substeps() const
{
  return static_cast<int>(std::lround(control_dt() / simulation.dt));
}

void Config::validate() const
{
  const ControllerConfig& ctl = controller;
  const LegGeometry& leg = ctl.geometry.leg;
  positive("geometry.l_hip", leg.l_hip);
  positive("geometry.l_upper", leg.l_upper);
  positive("geometry.l_lower", leg.l_lower);
  ordered("geometry.hip_min_deg", "geometry.hip_max_deg", leg.hip_limits.lo, leg.hip_limits.hi);
  ordered("geometry.upper_min_deg", "geometry.upper_max_deg", leg.upper_limits.lo, leg.upper_limits.hi);
  ordered("geometry.lower_min_deg", "geometry.lower_max_deg", leg.lower_limits.lo, leg.lower_limits.hi);

  static const char* const mount_keys[4] = {"mounts.fl", "mounts.fr", "mounts.bl", "mounts.br"};
  for (LegId id : kAllLegs) {
    const Vec3& p = ctl.geometry.mount(id);
    const double fx = end_of(id) == End::Front ? 1.0 : -1.0;
    if (!p.allFinite() || !(p.x() * fx > 0.0) || !(p.y() * lateral_sign(id) > 0.0)) {
      throw ConfigValidationError(mount_keys[index(id)], "must lie in the leg's body quadrant");
    }
  }

  const GaitLimits& gl = ctl.limits.gait;
  positive("limits.max_step_x", gl.max_step_x);
  positive("limits.max_step_y", gl.max_step_y);
  positive("limits.max_swing_height", gl.max_swing_height);
  within("limits.max_stance_depth", gl.max_stance_depth, 0.0, 1.0);
  positive("limits.min_cycle_period", gl.min_cycle_period);
  ordered("limits.min_cycle_period", "limits.max_cycle_period", gl.min_cycle_period,
          gl.max_cycle_period);

  positive("body.min_height", ctl.limits.height.lo);
  ordered("body.min_height", "body.max_height", ctl.limits.height.lo, ctl.limits.height.hi);
  within("body.height", gait_defaults.body_height, ctl.limits.height.lo, ctl.limits.height.hi);
  positive("body.sit_height", ctl.sit_height);
  within("body.max_roll_deg", ctl.limits.max_roll, 0.0, deg2rad(90.0));
  within("body.max_pitch_deg", ctl.limits.max_pitch, 0.0, deg2rad(90.0));
  within("body.max_yaw_deg", ctl.limits.max_yaw, 0.0, deg2rad(90.0));

  positive("gait.cycle_period", gait_defaults.cycle_period);
  within("gait.cycle_period", gait_defaults.cycle_period, gl.min_cycle_period, gl.max_cycle_period);
  positive("gait.walk_cycle_period", gait_defaults.walk_cycle_period);
  within("gait.walk_cycle_period", gait_defaults.walk_cycle_period, gl.min_cycle_period,
         gl.max_cycle_period);
  within("gait.swing_height", gait_defaults.swing_height, 0.0, gl.max_swing_height);
  within("gait.stance_depth", gait_defaults.stance_depth, 0.0, gl.max_stance_depth);
  if (!(ctl.gait.walk_duty > 0.75 && ctl.gait.walk_duty < 1.0)) {
    throw ConfigValidationError("gait.walk_duty", "must lie in (0.75, 1)");
  }
  within("gait.walk_lean", ctl.gait.walk_lean, 0.0, 0.1);
  positive("gait.lean_ramp", ctl.gait.lean_ramp);
  if (!(ctl.gait.lean_ramp <= ctl.gait.walk_duty - 0.75 + 1e-12)) {
    throw ConfigValidationError("gait.lean_ramp", "must fit in the four-foot window");
  }
  positive("gait.lean_full_height", ctl.gait.lean_full_height);

  positive("controller.rate_hz", ctl.rate_hz);
  positive("controller.ramp_time", ctl.ramp_time);
  positive("controller.gait_ramp_time", ctl.gait_ramp_time);
  if (!(ctl.max_joint_speed > 0.0)) {
    throw ConfigValidationError("controller.max_joint_speed", "must be positive");
  }
  positive("controller.height_rate", ctl.rates.height);
  positive("controller.angle_rate_deg", ctl.rates.angle);
  positive("controller.step_rate", ctl.rates.step);
  positive("controller.period_rate", ctl.rates.cycle_period);

  if (!(servo.max_speed > 0.0)) throw ConfigValidationError("servo.max_speed", "must be positive");
  positive("servo.max_torque", servo.max_torque);

  positive("simulation.dt", simulation.dt);
  within("simulation.contact_epsilon", simulation.contact_epsilon, 0.0, 0.01);
  const double ratio = control_dt() / simulation.dt;
  if (std::lround(ratio) < 1 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigValidationError("simulation.dt", "must divide the controller period evenly");
  }

  within("server.port", server.port, 0, 65535);
  positive("server.state_rate_hz", server.state_rate_hz);

  positive("damper.threshold_force", damper.threshold_force);
  positive("damper.displacement_ratio", damper.displacement_ratio);
  positive("damper.max_displacement", damper.max_displacement);

  standable("body.min_height", ctl.limits.height.lo, ctl.geometry);
  standable("body.max_height", ctl.limits.height.hi, ctl.geometry);
  standable("body.sit_height", ctl.sit_height, ctl.geometry);
  standable("body.height", gait_defaults.body_height, ctl.geometry);
}

Config default_config() { return Config{}; }

Config parse_config(std::string_view text)
{
  const kv::Document doc = kv::parse(text);
  Config config;
  std::set<std::string> known;
  for (auto& [section, fields] : schema(config)) {
    for (Field& f : fields) {
      const std::string key = section + "." + f.key;
      known.insert(key);
      if (auto it = doc.find(key); it != doc.end()) f.read(it->second, key);
    }
  }
  for (const auto& [key, entry] : doc) {
    if (!known.contains(key)) throw ConfigParseError(entry.line, "unknown key '" + key + "'");
  }
  config.validate();
  return config;
}

Config load_config(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_config(text.str());
}

std::string render_config(const Config& config)
{
  Config copy = config;
  std::string out;
  for (auto& [section, fields] : schema(copy)) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (Field& f : fields) out += f.key + " = " + f.write() + "\n";
  }
  return out;
}

}  // namespace pawsim
