#include "pawsim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pawsim {

namespace {

// Slack for floating point at exact joint-limit boundaries. Angles inside the slack are
// clamped onto the limit, so returned angles are always within limits.
constexpr double kLimitSlack = 1e-12;
constexpr double kReachSlack = 1e-12;

bool accept(const Interval& limits, double& angle)
{
  if (angle < limits.lo - kLimitSlack || angle > limits.hi + kLimitSlack) {
    return false;
  }
  angle = limits.clamp(angle);
  return true;
}

void check_interval(const Interval& in, const char* name)
{
  if (!std::isfinite(in.lo) || !std::isfinite(in.hi) || !(in.lo < in.hi)) {
    throw std::invalid_argument(std::string(name) + ": limit interval must satisfy lo < hi");
  }
}

}  // namespace

double wrap_angle(double angle)
{
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) {
    wrapped += 2.0 * std::numbers::pi;
  }
  return wrapped;
}

std::string_view to_string(LegId leg)
{
  switch (leg) {
    case LegId::FL: return "FL";
    case LegId::FR: return "FR";
    case LegId::BL: return "BL";
    case LegId::BR: return "BR";
  }
  return "?";
}

std::optional<LegId> parse_leg(std::string_view name)
{
  for (LegId leg : kAllLegs) {
    if (name == to_string(leg)) {
      return leg;
    }
  }
  return std::nullopt;
}

std::string_view to_string(IkError error)
{
  switch (error) {
    case IkError::Unreachable: return "unreachable";
    case IkError::JointLimitViolation: return "joint_limit_violation";
  }
  return "?";
}

void LegGeometry::validate() const
{
  if (!(l_hip > 0.0)) throw std::invalid_argument("l_hip: must be positive");
  if (!(l_upper > 0.0)) throw std::invalid_argument("l_upper: must be positive");
  if (!(l_lower > 0.0)) throw std::invalid_argument("l_lower: must be positive");
  check_interval(hip_limits, "hip_limits");
  check_interval(upper_limits, "upper_limits");
  check_interval(lower_limits, "lower_limits");
}

bool LegGeometry::within_limits(const JointAngles& q) const
{
  return hip_limits.contains(q.hip) && upper_limits.contains(q.upper) &&
         lower_limits.contains(q.lower);
}

FootTarget leg_fk(const JointAngles& q, const LegGeometry& geom, LegId leg)
{
  // Sagittal plane of the leg, before hip roll.
  const double px = -geom.l_upper * std::sin(q.upper) + geom.l_lower * std::sin(q.upper + q.lower);
  const double pz = -geom.l_upper * std::cos(q.upper) + geom.l_lower * std::cos(q.upper + q.lower);
  const double py = lateral_sign(leg) * geom.l_hip;

  const double c = std::cos(q.hip);
  const double s = std::sin(q.hip);
  return {px, c * py - s * pz, s * py + c * pz};
}

IkResult leg_ik(const FootTarget& target, const LegGeometry& geom, LegId leg)
{
  const double x = target.x();
  const double y = target.y();
  const double z = target.z();
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    return IkError::Unreachable;
  }

  const double hip_offset = lateral_sign(leg) * geom.l_hip;
  const double yz_sq = y * y + z * z;
  const double offset_sq = geom.l_hip * geom.l_hip;
  if (yz_sq < offset_sq) {
    return IkError::Unreachable;
  }
  const double plane_z = std::sqrt(yz_sq - offset_sq);

  const double l2 = geom.l_upper;
  const double l3 = geom.l_lower;
  double d = std::sqrt(x * x + plane_z * plane_z);
  if (d > l2 + l3 + kReachSlack || d < std::abs(l2 - l3) - kReachSlack || d < kReachSlack) {
    return IkError::Unreachable;
  }
  // Workspace boundary within the slack counts as reachable geometry.
  d = std::clamp(d, std::abs(l2 - l3), l2 + l3);
  const double d_sq = d * d;

  // Knee: interior angle from the law of cosines.
  const double cos_knee = std::clamp((l2 * l2 + l3 * l3 - d_sq) / (2.0 * l2 * l3), -1.0, 1.0);
  const double knee = std::atan2(std::sqrt(1.0 - cos_knee * cos_knee), cos_knee);
  // Angle at the hip between the hip-foot line and the upper link, knee behind the line.
  const double beta = std::atan2(l3 * std::sin(knee), l2 - l3 * std::cos(knee));

  for (const double pz : {-plane_z, plane_z}) {
    JointAngles q;
    q.hip = wrap_angle(std::atan2(z, y) - std::atan2(pz, hip_offset));
    q.upper = wrap_angle(std::atan2(-x, -pz) + beta);
    q.lower = knee;
    if (accept(geom.hip_limits, q.hip) && accept(geom.upper_limits, q.upper) &&
        accept(geom.lower_limits, q.lower)) {
      return q;
    }
    if (plane_z == 0.0) {
      break;
    }
  }
  return IkError::JointLimitViolation;
}

bool reachable(const FootTarget& target, const LegGeometry& geom, LegId leg)
{
  return leg_ik(target, geom, leg).ok();
}

}  // namespace pawsim
