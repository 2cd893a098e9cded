#include "pawsim/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pawsim {

Vec3 RobotGeometry::neutral_foot(LegId leg) const
{
  const Vec3& m = mount(leg);
  return {m.x(), m.y() + lateral_sign(leg) * this->leg.l_hip, 0.0};
}

std::array<Vec3, 4> RobotGeometry::neutral_stance() const
{
  std::array<Vec3, 4> feet;
  for (LegId id : kAllLegs) {
    feet[index(id)] = neutral_foot(id);
  }
  return feet;
}

void RobotGeometry::validate() const
{
  leg.validate();
  for (LegId id : kAllLegs) {
    const Vec3& m = mount(id);
    if (!m.allFinite()) {
      throw std::invalid_argument("mounts." + std::string(to_string(id)) + ": must be finite");
    }
    const bool front_ok = (end_of(id) == End::Front) ? m.x() > 0.0 : m.x() < 0.0;
    const bool side_ok = lateral_sign(id) * m.y() > 0.0;
    if (!front_ok || !side_ok) {
      throw std::invalid_argument("mounts." + std::string(to_string(id)) +
                                  ": must lie in the leg's body quadrant");
    }
  }
}

RotationMatrix rot_x(double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotationMatrix r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

RotationMatrix rot_y(double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotationMatrix r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

RotationMatrix rot_z(double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotationMatrix r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

RotationMatrix body_rotation(const BodyPose& pose)
{
  return rot_z(pose.yaw) * rot_y(pose.pitch) * rot_x(pose.roll);
}

Vec3 body_translation(const BodyPose& pose) { return {0.0, pose.lateral_shift, pose.height}; }

BodyIkResult body_ik(const BodyPose& pose, const std::array<Vec3, 4>& feet,
                     const RobotGeometry& geometry)
{
  const RotationMatrix r_t = body_rotation(pose).transpose();
  const Vec3 t = body_translation(pose);

  BodyIkResult result;
  for (LegId id : kAllLegs) {
    const std::size_t i = index(id);
    result.targets[i] = r_t * (feet[i] - t) - geometry.mount(id);
    if (!result.infeasible_leg && !reachable(result.targets[i], geometry.leg, id)) {
      result.infeasible_leg = id;
    }
  }
  return result;
}

std::array<Vec3, 4> feet_from_targets(const BodyPose& pose,
                                      const std::array<FootTarget, 4>& targets,
                                      const RobotGeometry& geometry)
{
  const RotationMatrix r = body_rotation(pose);
  const Vec3 t = body_translation(pose);
  std::array<Vec3, 4> feet;
  for (LegId id : kAllLegs) {
    const std::size_t i = index(id);
    feet[i] = r * (targets[i] + geometry.mount(id)) + t;
  }
  return feet;
}

}  // namespace pawsim
