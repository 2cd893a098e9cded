#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>
#include <optional>

#include "pawsim/kinematics.hpp"

namespace pawsim {

enum class GaitPattern { Trot, Walk };
enum class SideWalkMode { Linear, Rotation };

std::string_view to_string(GaitPattern pattern);
std::string_view to_string(SideWalkMode mode);
std::optional<GaitPattern> parse_gait_pattern(std::string_view name);
std::optional<SideWalkMode> parse_side_walk_mode(std::string_view name);

struct GaitCommand
{
  GaitPattern pattern = GaitPattern::Trot;
  double step_length_x = 0.0;  ///< m, forward travel of a foot per step
  double step_length_y = 0.0;  ///< m, lateral travel (linear) or yaw tangent (rotation)
  double swing_height = 0.0;   ///< m, peak lift during swing
  double stance_depth = 0.0;   ///< m, optional ground press during stance
  SideWalkMode side_walk_mode = SideWalkMode::Linear;
  double cycle_period = 0.8;   ///< s

  bool operator==(const GaitCommand&) const = default;
};

/// Clamp table shared by the controller, the wire protocol and any client.
struct GaitLimits
{
  double max_step_x = 0.10;
  double max_step_y = 0.06;
  double max_swing_height = 0.08;
  double max_stance_depth = 0.02;
  double min_cycle_period = 0.3;
  double max_cycle_period = 4.0;

  GaitCommand clamp(const GaitCommand& cmd) const;
  bool admits(const GaitCommand& cmd) const;
};

/// Per-leg stance-onset phase offsets and duty factor of a pattern.
struct GaitSchedule
{
  std::array<double, 4> offsets{};  ///< indexed by LegId
  double duty = 0.5;

  double offset(LegId leg) const { return offsets[index(leg)]; }
};

/// Diagonal pairs: FL/BR start stance at phase 0, FR/BL at 0.5. Duty 0.5.
GaitSchedule trot_schedule();

/// One leg at a time in order BR, FR, BL, FL. Each leg swings in the last (1 - duty) of its
/// quarter; the first part of every quarter has all four feet down, which is where the body
/// lean changes side.
GaitSchedule walk_schedule(double duty = 0.85);

struct LegPhase
{
  bool stance = true;
  double local = 0.0;  ///< progress within the current segment, [0, 1)
};

/// Stance iff (global - offset) mod 1 lies in [0, duty).
LegPhase leg_phase(double global_phase, double offset, double duty);

/// Foot displacement from the neutral point. Horizontal progress -step/2 -> +step/2,
/// lift swing_height * sin(pi * local).
Vec3 swing_trajectory(double local_phase, const GaitCommand& cmd);

/// Horizontal progress +step/2 -> -step/2 at constant rate, press -stance_depth * sin(pi * local).
Vec3 stance_trajectory(double local_phase, const GaitCommand& cmd);

struct FootPlan
{
  std::array<Vec3, 4> displacement{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<bool, 4> stance{true, true, true, true};
  double lateral_shift = 0.0;
};

struct GaitParams
{
  double walk_duty = 0.85;
  double walk_lean = 0.03;          ///< m, body lean amplitude of the walk
  double lean_ramp = 0.10;          ///< cycle fraction over which the lean changes side
  double lean_full_height = 0.01;   ///< swing height at which the full lean applies

  void validate() const;
};

class DegenerateSupport : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Signed distance from `com` to the boundary of the convex hull of `stance_feet`, positive
/// inside. Throws DegenerateSupport with fewer than three feet.
double com_margin(std::span<const Vec2> stance_feet, const Vec2& com);

/// Stateless pattern generator. Pure function of (phase, command).
class GaitPlanner
{
public:
  GaitPlanner(GaitParams params, const std::array<Vec3, 4>& neutral_feet);

  const GaitParams& params() const { return params_; }
  const GaitSchedule& trot() const { return trot_; }
  const GaitSchedule& walk() const { return walk_; }

  /// Linear mode passes the displacement through. Rotation mode turns the lateral part
  /// into a yaw step: each foot moves along the counter-clockwise tangent at its neutral
  /// point, scaled so the mean tangent magnitude equals |step_length_y|.
  Vec3 steer_displacement(LegId leg, const Vec3& base, const GaitCommand& cmd) const;

  FootPlan plan_trot(double global_phase, const GaitCommand& cmd) const;
  FootPlan plan_walk(double global_phase, const GaitCommand& cmd) const;
  FootPlan plan(double global_phase, const GaitCommand& cmd) const;

  /// Lateral body shift of the walk at a phase for a given swing height.
  double walk_lean(double global_phase, double swing_height) const;

  /// Support margin of a plan in the walking frame (CoM at the shifted body center).
  double plan_margin(const FootPlan& plan) const;

private:
  FootPlan plan_with(const GaitSchedule& schedule, double global_phase,
                     const GaitCommand& cmd) const;

  GaitParams params_;
  GaitSchedule trot_;
  GaitSchedule walk_;
  std::array<Vec3, 4> neutral_;
  std::array<Vec2, 4> tangent_;  ///< CCW tangent per leg, scaled by |r| / mean|r|
};

}  // namespace pawsim
