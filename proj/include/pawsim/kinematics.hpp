#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace pawsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using RotationMatrix = Eigen::Matrix3d;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

// ---------------------------------------------------------------------------
// Legs
// ---------------------------------------------------------------------------

enum class LegId : int { FL = 0, FR = 1, BL = 2, BR = 3 };
enum class Side { Left, Right };
enum class End { Front, Back };

inline constexpr std::array<LegId, 4> kAllLegs{LegId::FL, LegId::FR, LegId::BL, LegId::BR};
inline constexpr std::size_t kLegCount = 4;
inline constexpr std::size_t kJointCount = 12;

constexpr std::size_t index(LegId leg) { return static_cast<std::size_t>(leg); }

constexpr Side side_of(LegId leg)
{
  return (leg == LegId::FL || leg == LegId::BL) ? Side::Left : Side::Right;
}

constexpr End end_of(LegId leg)
{
  return (leg == LegId::FL || leg == LegId::FR) ? End::Front : End::Back;
}

/// +1 for left legs, -1 for right legs. The hip link points outward along this sign of y.
constexpr double lateral_sign(LegId leg) { return side_of(leg) == Side::Left ? 1.0 : -1.0; }

std::string_view to_string(LegId leg);
std::optional<LegId> parse_leg(std::string_view name);

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Interval
{
  double lo = 0.0;
  double hi = 0.0;

  constexpr bool contains(double v) const { return v >= lo && v <= hi; }
  constexpr double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

/// Joint angles of one leg, radians.
///
///  - hip:   roll about the body x axis, right-handed, zero with the hip link horizontal.
///  - upper: pitch of the upper link about the y axis, right-handed, zero pointing straight
///           down. Positive swings the upper link backward.
///  - lower: interior knee angle between the upper and lower links. Collinear links are
///           kKneeStraight (pi); the joint range [30 deg, 130 deg] never reaches it.
struct JointAngles
{
  double hip = 0.0;
  double upper = 0.0;
  double lower = 0.0;

  bool operator==(const JointAngles&) const = default;
};

/// Knee value for collinear upper and lower links.
inline constexpr double kKneeStraight = std::numbers::pi;

struct LegGeometry
{
  double l_hip = 0.104;
  double l_upper = 0.150;
  double l_lower = 0.150;
  Interval hip_limits{deg2rad(-90.0), deg2rad(90.0)};
  Interval upper_limits{deg2rad(-70.0), deg2rad(170.0)};
  Interval lower_limits{deg2rad(30.0), deg2rad(130.0)};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool within_limits(const JointAngles& q) const;
};

/// Foot position in a leg's hip frame: origin at the hip-roll joint, axes parallel to the
/// body (x forward, y left, z up), meters.
using FootTarget = Vec3;

/// Leg geometry plus the hip-roll joint positions relative to the body center.
struct RobotGeometry
{
  LegGeometry leg;
  std::array<Vec3, 4> mounts{Vec3{0.120, 0.055, 0.0}, Vec3{0.120, -0.055, 0.0},
                             Vec3{-0.120, 0.055, 0.0}, Vec3{-0.120, -0.055, 0.0}};

  const Vec3& mount(LegId leg) const { return mounts[index(leg)]; }

  /// Ground point directly below the foot of a vertical leg with zero hip roll, expressed in
  /// the walking frame (origin on the ground below the body center).
  Vec3 neutral_foot(LegId leg) const;
  std::array<Vec3, 4> neutral_stance() const;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Leg kinematics
// ---------------------------------------------------------------------------

/// Closed-form forward kinematics. Limits are not enforced.
FootTarget leg_fk(const JointAngles& q, const LegGeometry& geom, LegId leg);

enum class IkError { Unreachable, JointLimitViolation };

std::string_view to_string(IkError error);

class IkResult
{
public:
  IkResult(JointAngles angles) : angles_(angles) {}
  IkResult(IkError error) : error_(error) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }

  /// Precondition: ok().
  const JointAngles& angles() const { return angles_; }
  const JointAngles& operator*() const { return angles_; }
  const JointAngles* operator->() const { return &angles_; }
  std::optional<IkError> error() const { return error_; }

private:
  JointAngles angles_{};
  std::optional<IkError> error_;
};

/// Analytical inverse kinematics with the knee pointing backward.
///
/// Hip roll comes from the (y, z) projection with the hip-link offset, then a planar
/// two-link solution in the rotated sagittal plane. The leg-below-hip roll branch is tried
/// first; the leg-above-hip branch is a fallback when the first one breaks a joint limit.
IkResult leg_ik(const FootTarget& target, const LegGeometry& geom, LegId leg);

bool reachable(const FootTarget& target, const LegGeometry& geom, LegId leg);

// ---------------------------------------------------------------------------
// Body orientation
// ---------------------------------------------------------------------------

/// Body height above ground, orientation and lateral CoM lean. Radians and meters.
struct BodyPose
{
  double height = 0.17;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double lateral_shift = 0.0;

  bool operator==(const BodyPose&) const = default;
};

RotationMatrix rot_x(double angle);
RotationMatrix rot_y(double angle);
RotationMatrix rot_z(double angle);

/// Rz(yaw) * Ry(pitch) * Rx(roll).
RotationMatrix body_rotation(const BodyPose& pose);

/// Body center in the walking frame: (0, lateral_shift, height).
Vec3 body_translation(const BodyPose& pose);

struct BodyIkResult
{
  std::array<FootTarget, 4> targets;
  /// First leg (in FL, FR, BL, BR order) whose target cannot be solved.
  std::optional<LegId> infeasible_leg;

  bool feasible() const { return !infeasible_leg.has_value(); }
};

/// Maps walking-frame foot positions to per-leg hip-frame targets for the given body pose:
/// target = R^T (p - t_body) - mount.
BodyIkResult body_ik(const BodyPose& pose, const std::array<Vec3, 4>& feet,
                     const RobotGeometry& geometry);

/// Inverse of body_ik's transform: walking-frame foot positions from hip-frame targets.
std::array<Vec3, 4> feet_from_targets(const BodyPose& pose,
                                      const std::array<FootTarget, 4>& targets,
                                      const RobotGeometry& geometry);

}  // namespace pawsim
