#include "pawsim/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pawsim {

namespace {

double unit_phase(double phase)
{
  double p = phase - std::floor(phase);
  return p >= 1.0 ? 0.0 : p;
}

double smoothstep(double t)
{
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

std::string_view to_string(GaitPattern pattern)
{
  return pattern == GaitPattern::Trot ? "trot" : "walk";
}

std::string_view to_string(SideWalkMode mode)
{
  return mode == SideWalkMode::Linear ? "linear" : "rotation";
}

std::optional<GaitPattern> parse_gait_pattern(std::string_view name)
{
  if (name == "trot") return GaitPattern::Trot;
  if (name == "walk") return GaitPattern::Walk;
  return std::nullopt;
}

std::optional<SideWalkMode> parse_side_walk_mode(std::string_view name)
{
  if (name == "linear") return SideWalkMode::Linear;
  if (name == "rotation") return SideWalkMode::Rotation;
  return std::nullopt;
}

GaitCommand GaitLimits::clamp(const GaitCommand& cmd) const
{
  auto finite_or = [](double v, double fallback) { return std::isfinite(v) ? v : fallback; };
  GaitCommand out = cmd;
  out.step_length_x = std::clamp(finite_or(cmd.step_length_x, 0.0), -max_step_x, max_step_x);
  out.step_length_y = std::clamp(finite_or(cmd.step_length_y, 0.0), -max_step_y, max_step_y);
  out.swing_height = std::clamp(finite_or(cmd.swing_height, 0.0), 0.0, max_swing_height);
  out.stance_depth = std::clamp(finite_or(cmd.stance_depth, 0.0), 0.0, max_stance_depth);
  out.cycle_period = std::clamp(finite_or(cmd.cycle_period, max_cycle_period), min_cycle_period,
                                max_cycle_period);
  return out;
}

bool GaitLimits::admits(const GaitCommand& cmd) const { return clamp(cmd) == cmd; }

GaitSchedule trot_schedule()
{
  GaitSchedule s;
  s.offsets[index(LegId::FL)] = 0.0;
  s.offsets[index(LegId::BR)] = 0.0;
  s.offsets[index(LegId::FR)] = 0.5;
  s.offsets[index(LegId::BL)] = 0.5;
  s.duty = 0.5;
  return s;
}

GaitSchedule walk_schedule(double duty)
{
  // Leg k of the sequence swings at the end of quarter k, so its stance starts at (k+1)/4.
  GaitSchedule s;
  s.offsets[index(LegId::BR)] = 0.25;
  s.offsets[index(LegId::FR)] = 0.50;
  s.offsets[index(LegId::BL)] = 0.75;
  s.offsets[index(LegId::FL)] = 0.0;
  s.duty = duty;
  return s;
}

LegPhase leg_phase(double global_phase, double offset, double duty)
{
  const double shifted = unit_phase(global_phase - offset);
  if (shifted < duty) {
    return {true, shifted / duty};
  }
  return {false, std::min((shifted - duty) / (1.0 - duty), std::nextafter(1.0, 0.0))};
}

Vec3 swing_trajectory(double local_phase, const GaitCommand& cmd)
{
  const double progress = local_phase - 0.5;
  return {progress * cmd.step_length_x, progress * cmd.step_length_y,
          cmd.swing_height * std::sin(std::numbers::pi * local_phase)};
}

Vec3 stance_trajectory(double local_phase, const GaitCommand& cmd)
{
  const double progress = 0.5 - local_phase;
  return {progress * cmd.step_length_x, progress * cmd.step_length_y,
          -cmd.stance_depth * std::sin(std::numbers::pi * local_phase)};
}

void GaitParams::validate() const
{
  if (!(walk_duty > 0.75 && walk_duty < 1.0)) {
    throw std::invalid_argument("walk_duty: must lie in (0.75, 1)");
  }
  if (!(walk_lean >= 0.0)) throw std::invalid_argument("walk_lean: must be non-negative");
  if (!(lean_ramp > 0.0 && lean_ramp <= 0.25 - (1.0 - walk_duty) + 1e-12)) {
    throw std::invalid_argument("lean_ramp: must be positive and fit the four-foot window");
  }
  if (!(lean_full_height > 0.0)) {
    throw std::invalid_argument("lean_full_height: must be positive");
  }
}

GaitPlanner::GaitPlanner(GaitParams params, const std::array<Vec3, 4>& neutral_feet)
  : params_(params), trot_(trot_schedule()), walk_(walk_schedule(params.walk_duty)),
    neutral_(neutral_feet)
{
  params_.validate();
  double mean_radius = 0.0;
  for (const Vec3& p : neutral_) mean_radius += p.head<2>().norm();
  mean_radius /= 4.0;
  for (LegId leg : kAllLegs) {
    const Vec2 r = neutral_[index(leg)].head<2>();
    tangent_[index(leg)] = Vec2{-r.y(), r.x()} / mean_radius;
  }
}

Vec3 GaitPlanner::steer_displacement(LegId leg, const Vec3& base, const GaitCommand& cmd) const
{
  if (cmd.side_walk_mode == SideWalkMode::Linear) {
    return base;
  }
  const Vec2& t = tangent_[index(leg)];
  return {base.x() + base.y() * t.x(), base.y() * t.y(), base.z()};
}

FootPlan GaitPlanner::plan_with(const GaitSchedule& schedule, double global_phase,
                                const GaitCommand& cmd) const
{
  FootPlan plan;
  for (LegId leg : kAllLegs) {
    const LegPhase lp = leg_phase(global_phase, schedule.offset(leg), schedule.duty);
    const Vec3 base = lp.stance ? stance_trajectory(lp.local, cmd) : swing_trajectory(lp.local, cmd);
    plan.displacement[index(leg)] = steer_displacement(leg, base, cmd);
    plan.stance[index(leg)] = lp.stance;
  }
  return plan;
}

FootPlan GaitPlanner::plan_trot(double global_phase, const GaitCommand& cmd) const
{
  return plan_with(trot_, global_phase, cmd);
}

FootPlan GaitPlanner::plan_walk(double global_phase, const GaitCommand& cmd) const
{
  FootPlan plan = plan_with(walk_, global_phase, cmd);
  plan.lateral_shift = walk_lean(global_phase, cmd.swing_height);
  return plan;
}

FootPlan GaitPlanner::plan(double global_phase, const GaitCommand& cmd) const
{
  return cmd.pattern == GaitPattern::Trot ? plan_trot(global_phase, cmd)
                                          : plan_walk(global_phase, cmd);
}

double GaitPlanner::walk_lean(double global_phase, double swing_height) const
{
  // Lean left (+y) while the right legs swing in [0, 0.5), right while the left legs swing.
  // The side change happens in the four-foot window that opens each half cycle.
  const double amplitude =
      params_.walk_lean * std::clamp(swing_height / params_.lean_full_height, 0.0, 1.0);
  const double g = unit_phase(global_phase);
  const double ramp = params_.lean_ramp;
  if (g < ramp) return amplitude * (2.0 * smoothstep(g / ramp) - 1.0);
  if (g < 0.5) return amplitude;
  if (g < 0.5 + ramp) return amplitude * (1.0 - 2.0 * smoothstep((g - 0.5) / ramp));
  return -amplitude;
}

double GaitPlanner::plan_margin(const FootPlan& plan) const
{
  std::array<Vec2, 4> feet;
  std::size_t n = 0;
  for (LegId leg : kAllLegs) {
    if (plan.stance[index(leg)]) {
      feet[n++] = (neutral_[index(leg)] + plan.displacement[index(leg)]).head<2>();
    }
  }
  return com_margin(std::span<const Vec2>(feet.data(), n), Vec2{0.0, plan.lateral_shift});
}

}  // namespace pawsim
