#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pawsim/simulator.hpp"

namespace pawsim {

PlanarMotion fit_planar_motion(std::span<const Vec2> prev, std::span<const Vec2> cur)
{
  if (prev.size() != cur.size()) {
    throw std::invalid_argument("fit_planar_motion: point sets differ in size");
  }
  if (prev.empty()) {
    throw NoStanceFeet();
  }

  Vec2 c_prev = Vec2::Zero();
  Vec2 c_cur = Vec2::Zero();
  for (std::size_t i = 0; i < prev.size(); ++i) {
    c_prev += prev[i];
    c_cur += cur[i];
  }
  c_prev /= static_cast<double>(prev.size());
  c_cur /= static_cast<double>(cur.size());

  PlanarMotion out;
  if (prev.size() > 1) {
    double dot = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const Vec2 a = cur[i] - c_cur;
      const Vec2 b = prev[i] - c_prev;
      dot += a.dot(b);
      cross += a.x() * b.y() - a.y() * b.x();
    }
    if (dot != 0.0 || cross != 0.0) {
      out.rotation = std::atan2(cross, dot);
    }
  }
  const double c = std::cos(out.rotation);
  const double s = std::sin(out.rotation);
  out.translation = c_prev - Vec2{c * c_cur.x() - s * c_cur.y(), s * c_cur.x() + c * c_cur.y()};
  return out;
}

Pose2 compose(const Pose2& pose, const PlanarMotion& delta)
{
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const Vec2& t = delta.translation;
  return {pose.x + c * t.x() - s * t.y(), pose.y + s * t.x() + c * t.y(),
          wrap_angle(pose.heading + delta.rotation)};
}

}  // namespace pawsim
