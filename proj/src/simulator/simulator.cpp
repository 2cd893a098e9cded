#include <cmath>
#include <stdexcept>
#include <vector>

#include "pawsim/gait.hpp"
#include "pawsim/simulator.hpp"

namespace pawsim {

void ServoParams::validate() const
{
  if (!(max_speed > 0.0)) throw std::invalid_argument("max_speed: must be positive");
  if (!(max_torque > 0.0) || !std::isfinite(max_torque)) {
    throw std::invalid_argument("max_torque: must be positive");
  }
}

double servo_step(double current, double command, double dt, double max_speed,
                  const Interval& limits)
{
  const double max_step = max_speed * dt;
  const double delta = command - current;
  const double next = std::abs(delta) <= max_step ? command
                                                  : current + std::copysign(max_step, delta);
  return limits.clamp(next);
}

void SimulatorConfig::validate() const
{
  geometry.validate();
  servo.validate();
  if (!(contact_epsilon >= 0.0) || !std::isfinite(contact_epsilon)) {
    throw std::invalid_argument("contact_epsilon: must be finite and non-negative");
  }
}

Simulator::Simulator(SimulatorConfig config) : config_(std::move(config))
{
  config_.validate();
}

std::array<Vec3, 4> Simulator::feet_in_walking_frame(const std::array<double, kJointCount>& joints,
                                                     const BodyPose& body) const
{
  const RotationMatrix r = body_rotation(body);
  const Vec3 t = body_translation(body);
  std::array<Vec3, 4> feet;
  for (LegId leg : kAllLegs) {
    const std::size_t base = 3 * index(leg);
    const JointAngles q{joints[base], joints[base + 1], joints[base + 2]};
    feet[index(leg)] = t + r * (config_.geometry.mount(leg) + leg_fk(q, config_.geometry.leg, leg));
  }
  return feet;
}

void Simulator::update_contacts()
{
  std::vector<Vec2> support;
  for (std::size_t i = 0; i < kLegCount; ++i) {
    state_.stance[i] = state_.feet_body[i].z() <= config_.contact_epsilon;
    if (state_.stance[i]) support.push_back(state_.feet_body[i].head<2>());
  }
  state_.com_margin.reset();
  if (support.size() >= 3) {
    try {
      state_.com_margin = com_margin(support, body_translation(state_.body).head<2>());
    } catch (const DegenerateSupport&) {
      // Collinear support: no polygon, no margin.
    }
  }

  const double c = std::cos(state_.odometry.heading);
  const double s = std::sin(state_.odometry.heading);
  for (std::size_t i = 0; i < kLegCount; ++i) {
    const Vec3& p = state_.feet_body[i];
    state_.feet_world[i] = {state_.odometry.x + c * p.x() - s * p.y(),
                            state_.odometry.y + s * p.x() + c * p.y(), p.z()};
  }
}

void Simulator::reset(const std::array<double, kJointCount>& joints, const BodyPose& body)
{
  state_ = RobotState{};
  state_.joints = joints;
  state_.body = body;
  state_.feet_body = feet_in_walking_frame(joints, body);
  update_contacts();
}

const RobotState& Simulator::step(const JointCommandFrame& command, double dt)
{
  if (!std::isfinite(dt) || !(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be positive");
  }
  const LegGeometry& geom = config_.geometry.leg;
  const Interval* limits[3] = {&geom.hip_limits, &geom.upper_limits, &geom.lower_limits};

  const std::array<Vec3, 4> prev_feet = state_.feet_body;
  const std::array<bool, 4> prev_stance = state_.stance;

  for (std::size_t j = 0; j < kJointCount; ++j) {
    const double next =
        servo_step(state_.joints[j], command.joints[j], dt, config_.servo.max_speed, *limits[j % 3]);
    state_.joint_velocities[j] = (next - state_.joints[j]) / dt;
    state_.joints[j] = next;
  }
  state_.body = command.body;
  state_.feet_body = feet_in_walking_frame(state_.joints, state_.body);

  std::vector<Vec2> before;
  std::vector<Vec2> after;
  for (std::size_t i = 0; i < kLegCount; ++i) {
    if (prev_stance[i] && state_.feet_body[i].z() <= config_.contact_epsilon) {
      before.push_back(prev_feet[i].head<2>());
      after.push_back(state_.feet_body[i].head<2>());
    }
  }
  try {
    state_.odometry = compose(state_.odometry, fit_planar_motion(before, after));
    state_.odometry_frozen = false;
  } catch (const NoStanceFeet&) {
    state_.odometry_frozen = true;
  }

  ++state_.tick;
  state_.time += dt;
  update_contacts();
  return state_;
}

}  // namespace pawsim
