#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <optional>
#include <vector>

#include "pawsim/gait.hpp"
#include "pawsim/kinematics.hpp"

namespace pawsim {

/// One teleop sample: the two toggles, the gait parameters and the body reference.
/// body.lateral_shift is owned by the gait and ignored here.
struct TeleopCommand
{
  bool start = false;
  bool walk = false;
  GaitCommand gait;
  BodyPose body;
  double timestamp = 0.0;

  bool operator==(const TeleopCommand&) const = default;
};

struct CommandLimits
{
  GaitLimits gait;
  Interval height{0.08, 0.24};
  double max_roll = deg2rad(25.0);
  double max_pitch = deg2rad(25.0);
  double max_yaw = deg2rad(25.0);

  /// Non-finite values fall back to safe defaults; everything else is clamped.
  TeleopCommand clamp(const TeleopCommand& cmd) const;
  bool admits(const TeleopCommand& cmd) const { return clamp(cmd) == cmd; }
};

/// Maximum slew of smoothed command fields, per second.
struct SlewRates
{
  double height = 0.2;              ///< m/s
  double angle = deg2rad(90.0);     ///< rad/s
  double step = 0.1;                ///< m/s, step lengths and step heights
  double cycle_period = 1.0;        ///< s/s
};

enum class ControllerMode { Idle, Standing, Walking };

std::string_view to_string(ControllerMode mode);
std::optional<ControllerMode> parse_controller_mode(std::string_view name);

/// Mode transition graph: Idle <-> Standing via start, Standing <-> Walking via walk.
/// start = false returns to Idle from any mode.
ControllerMode apply_command(ControllerMode mode, const TeleopCommand& cmd);

/// Moves every numeric field of `prev` toward `next` by at most rate * dt. Flags, enums and
/// the timestamp are taken from `next`.
TeleopCommand smooth_command(const TeleopCommand& prev, const TeleopCommand& next, double dt,
                             const SlewRates& rates = {});

struct LegDiagnostic
{
  LegId leg;
  IkError error;

  bool operator==(const LegDiagnostic&) const = default;
};

/// Output of one control tick. Joints are ordered [FL, FR, BL, BR] x [hip, upper, lower].
struct JointCommandFrame
{
  std::uint64_t tick = 0;
  double time = 0.0;
  ControllerMode mode = ControllerMode::Idle;
  std::array<double, kJointCount> joints{};
  /// Body reference used for the whole-body transform, lean included.
  BodyPose body;
  /// Foot positions the joints realize, walking frame.
  std::array<Vec3, 4> planned_feet{};
  std::array<bool, 4> planned_stance{true, true, true, true};
  double gait_phase = 0.0;
  std::vector<LegDiagnostic> diagnostics;

  JointAngles leg(LegId id) const;
};

struct ControllerConfig
{
  RobotGeometry geometry;
  GaitParams gait;
  CommandLimits limits;
  SlewRates rates;
  double rate_hz = 100.0;
  double ramp_time = 1.0;        ///< s, sit-down / stand-up height interpolation
  double gait_ramp_time = 1.0;   ///< s, gait fade-in on start and settle on stop
  double sit_height = 0.10;      ///< m, body height while Idle
  double max_joint_speed = 7.0;  ///< rad/s, per-joint change limit of emitted frames

  void validate() const;
};

class NotInitialized : public std::logic_error
{
public:
  NotInitialized() : std::logic_error("controller used before initialize()") {}
};

/// Fixed-rate pipeline: smooth command -> mode logic -> gait plan -> body IK -> leg IK.
///
/// Single owner; not thread-safe. Commands reach it through a mailbox owned by the loop.
class Controller
{
public:
  explicit Controller(ControllerConfig config);

  /// Puts the robot in Idle at sit height. Throws std::runtime_error when the sit pose
  /// cannot be solved for the configured geometry.
  void initialize();
  bool initialized() const { return initialized_; }

  JointCommandFrame tick(const TeleopCommand& cmd, double dt);

  ControllerMode mode() const { return mode_; }
  double gait_phase() const { return phase_; }
  const TeleopCommand& smoothed_command() const { return smoothed_; }
  const ControllerConfig& config() const { return config_; }
  const GaitPlanner& planner() const { return planner_; }
  const std::array<double, kJointCount>& joints() const { return joints_; }

private:
  void enter(ControllerMode next);
  BodyPose body_reference(double dt);
  FootPlan gait_plan(double dt, double& plan_phase);

  ControllerConfig config_;
  GaitPlanner planner_;
  std::array<Vec3, 4> neutral_;
  bool initialized_ = false;

  ControllerMode mode_ = ControllerMode::Idle;
  TeleopCommand smoothed_;
  std::array<double, kJointCount> joints_{};
  std::uint64_t tick_ = 0;
  double time_ = 0.0;

  BodyPose pose_;
  BodyPose ramp_from_;
  double ramp_elapsed_ = 0.0;

  double phase_ = 0.0;
  double gain_ = 0.0;
  GaitPattern active_pattern_ = GaitPattern::Trot;
  SideWalkMode active_steer_ = SideWalkMode::Linear;
  FootPlan last_plan_;
  FootPlan settle_from_;
  double settle_elapsed_ = 0.0;
};

}  // namespace pawsim
