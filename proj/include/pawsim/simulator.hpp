#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "pawsim/controller.hpp"
#include "pawsim/kinematics.hpp"

namespace pawsim {

/// Servo model parameters. max_torque is carried for configuration compatibility; the
/// kinematic model does not use it.
struct ServoParams
{
  double max_speed = 7.0;   ///< rad/s
  double max_torque = 7.0;  ///< N m

  void validate() const;
};

/// Moves `current` toward `command` by at most max_speed * dt, then clamps to `limits`.
/// Reaches the command exactly when it is within one step.
double servo_step(double current, double command, double dt, double max_speed,
                  const Interval& limits);

/// Planar pose of the walking frame in the world: position and heading.
struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  bool operator==(const Pose2&) const = default;
};

/// Rigid planar motion p_prev = R(rotation) p_cur + translation.
struct PlanarMotion
{
  Vec2 translation = Vec2::Zero();
  double rotation = 0.0;
};

class NoStanceFeet : public std::runtime_error
{
public:
  NoStanceFeet() : std::runtime_error("no foot in stance on both ticks") {}
};

/// Least-squares rigid motion mapping `cur` onto `prev` (paired points). One pair gives a
/// pure translation. Throws NoStanceFeet on empty input, std::invalid_argument on a size
/// mismatch.
PlanarMotion fit_planar_motion(std::span<const Vec2> prev, std::span<const Vec2> cur);

/// Pose after moving by `delta` expressed in the frame of `pose`. Heading stays in (-pi, pi].
Pose2 compose(const Pose2& pose, const PlanarMotion& delta);

struct SimulatorConfig
{
  RobotGeometry geometry;
  ServoParams servo;
  double contact_epsilon = 1e-4;  ///< m, a foot at or below this height is in stance

  void validate() const;
};

struct RobotState
{
  std::uint64_t tick = 0;
  double time = 0.0;
  std::array<double, kJointCount> joints{};
  std::array<double, kJointCount> joint_velocities{};
  BodyPose body;
  Pose2 odometry;
  /// Foot positions in the walking frame and in the world.
  std::array<Vec3, 4> feet_body{};
  std::array<Vec3, 4> feet_world{};
  std::array<bool, 4> stance{true, true, true, true};
  /// Support margin of the stance feet, present with three or more of them.
  std::optional<double> com_margin;
  /// True when the last step had no foot in stance on both ticks.
  bool odometry_frozen = false;

  bool operator==(const RobotState&) const = default;
};

/// Kinematic twin. Joints follow commands through a rate-limited servo model; the body
/// follows the commanded reference pose; contact is height-based; odometry integrates the
/// rigid motion of the feet that stay in stance.
class Simulator
{
public:
  explicit Simulator(SimulatorConfig config);

  /// Places the robot with the given joints and body pose at the world origin.
  void reset(const std::array<double, kJointCount>& joints, const BodyPose& body);

  const RobotState& step(const JointCommandFrame& command, double dt);

  const RobotState& state() const { return state_; }
  const SimulatorConfig& config() const { return config_; }

  /// Walking-frame foot positions for a joint vector and body pose.
  std::array<Vec3, 4> feet_in_walking_frame(const std::array<double, kJointCount>& joints,
                                            const BodyPose& body) const;

private:
  void update_contacts();

  SimulatorConfig config_;
  RobotState state_;
};

}  // namespace pawsim
