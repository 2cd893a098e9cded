#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pawsim/controller.hpp"

namespace pawsim {

namespace {

double approach(double from, double to, double max_step)
{
  return from + std::clamp(to - from, -max_step, max_step);
}

BodyPose lerp(const BodyPose& a, const BodyPose& b, double t)
{
  auto mix = [t](double u, double v) { return u + (v - u) * t; };
  return {mix(a.height, b.height), mix(a.roll, b.roll), mix(a.pitch, b.pitch), mix(a.yaw, b.yaw),
          mix(a.lateral_shift, b.lateral_shift)};
}

FootPlan scaled(const FootPlan& plan, double gain)
{
  FootPlan out = plan;
  for (Vec3& d : out.displacement) d *= gain;
  out.lateral_shift *= gain;
  return out;
}

void require_positive(double v, const char* name)
{
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string(name) + ": must be positive and finite");
  }
}

}  // namespace

JointAngles JointCommandFrame::leg(LegId id) const
{
  const std::size_t base = 3 * index(id);
  return {joints[base], joints[base + 1], joints[base + 2]};
}

void ControllerConfig::validate() const
{
  geometry.validate();
  gait.validate();
  require_positive(rate_hz, "rate_hz");
  require_positive(ramp_time, "ramp_time");
  require_positive(gait_ramp_time, "gait_ramp_time");
  require_positive(sit_height, "sit_height");
  if (!(max_joint_speed > 0.0)) {
    throw std::invalid_argument("max_joint_speed: must be positive");
  }
  require_positive(rates.height, "rates.height");
  require_positive(rates.angle, "rates.angle");
  require_positive(rates.step, "rates.step");
  require_positive(rates.cycle_period, "rates.cycle_period");
  if (!(limits.height.lo > 0.0) || !(limits.height.lo < limits.height.hi)) {
    throw std::invalid_argument("limits.height: must satisfy 0 < lo < hi");
  }
}

Controller::Controller(ControllerConfig config)
    : config_(std::move(config)),
      planner_((config_.validate(), config_.gait), config_.geometry.neutral_stance()),
      neutral_(config_.geometry.neutral_stance())
{
}

void Controller::initialize()
{
  mode_ = ControllerMode::Idle;
  smoothed_ = config_.limits.clamp(TeleopCommand{});
  tick_ = 0;
  time_ = 0.0;
  pose_ = BodyPose{config_.sit_height, 0.0, 0.0, 0.0, 0.0};
  ramp_from_ = pose_;
  ramp_elapsed_ = config_.ramp_time;
  phase_ = 0.0;
  gain_ = 0.0;
  last_plan_ = FootPlan{};
  settle_from_ = FootPlan{};
  settle_elapsed_ = config_.gait_ramp_time;

  const BodyIkResult bik = body_ik(pose_, neutral_, config_.geometry);
  for (LegId leg : kAllLegs) {
    const IkResult r = leg_ik(bik.targets[index(leg)], config_.geometry.leg, leg);
    if (!r) {
      throw std::runtime_error("sit pose is not solvable for leg " + std::string(to_string(leg)));
    }
    const std::size_t base = 3 * index(leg);
    joints_[base] = r->hip;
    joints_[base + 1] = r->upper;
    joints_[base + 2] = r->lower;
  }
  initialized_ = true;
}

void Controller::enter(ControllerMode next)
{
  if (mode_ == ControllerMode::Walking) {
    settle_from_ = last_plan_;
    settle_elapsed_ = 0.0;
    phase_ = 0.0;
    gain_ = 0.0;
  }
  if (next == ControllerMode::Idle || mode_ == ControllerMode::Idle) {
    ramp_from_ = pose_;
    ramp_elapsed_ = 0.0;
  }
  if (next == ControllerMode::Walking) {
    active_pattern_ = smoothed_.gait.pattern;
    active_steer_ = smoothed_.gait.side_walk_mode;
    phase_ = 0.0;
    gain_ = 0.0;
    settle_elapsed_ = config_.gait_ramp_time;
  }
  mode_ = next;
}

BodyPose Controller::body_reference(double dt)
{
  BodyPose target{config_.sit_height, 0.0, 0.0, 0.0, 0.0};
  if (mode_ != ControllerMode::Idle) {
    target = smoothed_.body;
    target.lateral_shift = 0.0;
  }
  if (ramp_elapsed_ < config_.ramp_time) {
    ramp_elapsed_ = std::min(config_.ramp_time, ramp_elapsed_ + dt);
    return lerp(ramp_from_, target, ramp_elapsed_ / config_.ramp_time);
  }
  return target;
}

FootPlan Controller::gait_plan(double dt, double& plan_phase)
{
  plan_phase = phase_;
  if (mode_ == ControllerMode::Walking) {
    GaitCommand gc = smoothed_.gait;
    bool same_shape = gc.pattern == active_pattern_ && gc.side_walk_mode == active_steer_;
    if (!same_shape && gain_ == 0.0) {
      // Faded out: switch shape and restart the cycle.
      active_pattern_ = gc.pattern;
      active_steer_ = gc.side_walk_mode;
      phase_ = 0.0;
      same_shape = true;
    }
    gain_ = approach(gain_, same_shape ? 1.0 : 0.0, dt / config_.gait_ramp_time);
    gc.pattern = active_pattern_;
    gc.side_walk_mode = active_steer_;

    plan_phase = phase_;
    last_plan_ = scaled(planner_.plan(phase_, gc), gain_);
    phase_ += dt / gc.cycle_period;
    phase_ -= std::floor(phase_);
    return last_plan_;
  }

  if (settle_elapsed_ < config_.gait_ramp_time) {
    settle_elapsed_ = std::min(config_.gait_ramp_time, settle_elapsed_ + dt);
    const double remaining = 1.0 - settle_elapsed_ / config_.gait_ramp_time;
    FootPlan plan = scaled(settle_from_, remaining);
    for (std::size_t i = 0; i < kLegCount; ++i) {
      plan.stance[i] = settle_from_.stance[i] || remaining == 0.0;
    }
    return plan;
  }
  return FootPlan{};
}

JointCommandFrame Controller::tick(const TeleopCommand& cmd, double dt)
{
  if (!initialized_) {
    throw NotInitialized();
  }
  if (!std::isfinite(dt) || !(dt > 0.0)) {
    throw std::invalid_argument("tick: dt must be positive");
  }

  smoothed_ = smooth_command(smoothed_, config_.limits.clamp(cmd), dt, config_.rates);

  ControllerMode next = apply_command(mode_, smoothed_);
  // Walking starts only once the stand-up ramp has finished.
  if (mode_ == ControllerMode::Standing && next == ControllerMode::Walking &&
      ramp_elapsed_ < config_.ramp_time) {
    next = ControllerMode::Standing;
  }
  if (next != mode_) {
    enter(next);
  }

  JointCommandFrame frame;
  frame.tick = tick_;
  frame.mode = mode_;

  pose_ = body_reference(dt);
  const FootPlan plan = gait_plan(dt, frame.gait_phase);

  BodyPose pose = pose_;
  pose.lateral_shift = plan.lateral_shift;
  std::array<Vec3, 4> feet;
  for (std::size_t i = 0; i < kLegCount; ++i) {
    feet[i] = neutral_[i] + plan.displacement[i];
  }
  const BodyIkResult bik = body_ik(pose, feet, config_.geometry);

  const double max_step = config_.max_joint_speed * dt;
  for (LegId leg : kAllLegs) {
    const std::size_t base = 3 * index(leg);
    const IkResult r = leg_ik(bik.targets[index(leg)], config_.geometry.leg, leg);
    if (!r) {
      frame.diagnostics.push_back({leg, *r.error()});
      continue;
    }
    const double q[3] = {r->hip, r->upper, r->lower};
    for (std::size_t j = 0; j < 3; ++j) {
      joints_[base + j] = approach(joints_[base + j], q[j], max_step);
    }
  }

  ++tick_;
  time_ += dt;
  frame.time = time_;
  frame.joints = joints_;
  frame.body = pose;
  frame.planned_feet = feet;
  frame.planned_stance = plan.stance;
  return frame;
}

}  // namespace pawsim
