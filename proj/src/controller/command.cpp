#include <algorithm>
#include <cmath>

#include "pawsim/controller.hpp"

namespace pawsim {

namespace {

double slew(double from, double to, double max_step)
{
  return from + std::clamp(to - from, -max_step, max_step);
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

}  // namespace

std::string_view to_string(ControllerMode mode)
{
  switch (mode) {
    case ControllerMode::Idle: return "idle";
    case ControllerMode::Standing: return "standing";
    case ControllerMode::Walking: return "walking";
  }
  return "?";
}

std::optional<ControllerMode> parse_controller_mode(std::string_view name)
{
  for (ControllerMode m : {ControllerMode::Idle, ControllerMode::Standing, ControllerMode::Walking}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

TeleopCommand CommandLimits::clamp(const TeleopCommand& cmd) const
{
  TeleopCommand out = cmd;
  out.gait = gait.clamp(cmd.gait);
  out.body.height = height.clamp(finite_or(cmd.body.height, height.lo));
  out.body.roll = std::clamp(finite_or(cmd.body.roll, 0.0), -max_roll, max_roll);
  out.body.pitch = std::clamp(finite_or(cmd.body.pitch, 0.0), -max_pitch, max_pitch);
  out.body.yaw = std::clamp(finite_or(cmd.body.yaw, 0.0), -max_yaw, max_yaw);
  out.body.lateral_shift = 0.0;
  out.timestamp = finite_or(cmd.timestamp, 0.0);
  return out;
}

ControllerMode apply_command(ControllerMode mode, const TeleopCommand& cmd)
{
  if (!cmd.start) {
    return ControllerMode::Idle;
  }
  switch (mode) {
    case ControllerMode::Idle: return ControllerMode::Standing;
    case ControllerMode::Standing:
    case ControllerMode::Walking: return cmd.walk ? ControllerMode::Walking : ControllerMode::Standing;
  }
  return mode;
}

TeleopCommand smooth_command(const TeleopCommand& prev, const TeleopCommand& next, double dt,
                             const SlewRates& rates)
{
  TeleopCommand out = next;
  out.body.height = slew(prev.body.height, next.body.height, rates.height * dt);
  out.body.roll = slew(prev.body.roll, next.body.roll, rates.angle * dt);
  out.body.pitch = slew(prev.body.pitch, next.body.pitch, rates.angle * dt);
  out.body.yaw = slew(prev.body.yaw, next.body.yaw, rates.angle * dt);
  out.body.lateral_shift = slew(prev.body.lateral_shift, next.body.lateral_shift, rates.height * dt);

  const double step = rates.step * dt;
  out.gait.step_length_x = slew(prev.gait.step_length_x, next.gait.step_length_x, step);
  out.gait.step_length_y = slew(prev.gait.step_length_y, next.gait.step_length_y, step);
  out.gait.swing_height = slew(prev.gait.swing_height, next.gait.swing_height, step);
  out.gait.stance_depth = slew(prev.gait.stance_depth, next.gait.stance_depth, step);
  out.gait.cycle_period =
      slew(prev.gait.cycle_period, next.gait.cycle_period, rates.cycle_period * dt);
  return out;
}

}  // namespace pawsim
