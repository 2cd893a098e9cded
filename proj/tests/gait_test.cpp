#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pawsim/gait.hpp"

using namespace pawsim;

namespace {

const RobotGeometry kRobot{};

GaitPlanner planner() { return GaitPlanner(GaitParams{}, kRobot.neutral_stance()); }

GaitCommand walking(double sx, double sy = 0.0, double swing = 0.04)
{
  GaitCommand c;
  c.pattern = GaitPattern::Walk;
  c.step_length_x = sx;
  c.step_length_y = sy;
  c.swing_height = swing;
  c.cycle_period = 1.6;
  return c;
}

GaitCommand trotting(double sx, double sy = 0.0, double swing = 0.04)
{
  GaitCommand c = walking(sx, sy, swing);
  c.pattern = GaitPattern::Trot;
  c.cycle_period = 0.8;
  return c;
}

// Brute-force signed margin: an edge (i, j) belongs to the hull when every other point lies
// on one side of it. Only valid for non-degenerate point sets.
double oracle_margin(const std::vector<Vec2>& pts, const Vec2& c)
{
  double best_inside = 1e9;
  bool inside = true;
  double best_outside = 1e9;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Vec2 e = pts[j] - pts[i];
      bool left_of_all = true;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k == i || k == j) continue;
        const Vec2 v = pts[k] - pts[i];
        if (e.x() * v.y() - e.y() * v.x() <= 0) left_of_all = false;
      }
      if (!left_of_all) continue;
      const Vec2 v = c - pts[i];
      const double side = (e.x() * v.y() - e.y() * v.x()) / e.norm();
      if (side < 0) inside = false;
      // Closest point on the segment, sampled finely.
      double d = 1e9;
      for (int s = 0; s <= 20000; ++s) {
        d = std::min(d, (pts[i] + e * (s / 20000.0) - c).norm());
      }
      best_inside = std::min(best_inside, d);
      best_outside = std::min(best_outside, d);
    }
  }
  return inside ? best_inside : -best_outside;
}

}  // namespace

TEST(LegPhase, Examples)
{
  LegPhase p = leg_phase(0.25, 0.0, 0.5);
  EXPECT_TRUE(p.stance);
  EXPECT_DOUBLE_EQ(p.local, 0.5);
  p = leg_phase(0.75, 0.0, 0.5);
  EXPECT_FALSE(p.stance);
  EXPECT_DOUBLE_EQ(p.local, 0.5);
  p = leg_phase(0.10, 0.5, 0.75);
  EXPECT_TRUE(p.stance);
  EXPECT_NEAR(p.local, 0.8, 1e-12);
}

TEST(LegPhase, DutyAccountingSweep)
{
  for (const GaitSchedule& s : {trot_schedule(), walk_schedule()}) {
    for (LegId leg : kAllLegs) {
      int stance = 0;
      const int n = 1000;
      for (int i = 0; i < n; ++i) {
        const LegPhase p = leg_phase(i / double(n), s.offset(leg), s.duty);
        stance += p.stance;
        EXPECT_GE(p.local, 0.0);
        EXPECT_LT(p.local, 1.0);
      }
      EXPECT_NEAR(stance / double(n), s.duty, 2e-3);
    }
  }
}

TEST(Trajectory, SwingExamples)
{
  GaitCommand c = trotting(0.06, 0.02, 0.04);
  const Vec3 mid = swing_trajectory(0.5, c);
  EXPECT_NEAR(mid.x(), 0.0, 1e-15);
  EXPECT_NEAR(mid.z(), 0.04, 1e-15);
  const Vec3 lift_off = swing_trajectory(0.0, c);
  EXPECT_DOUBLE_EQ(lift_off.x(), -0.03);
  EXPECT_DOUBLE_EQ(lift_off.y(), -0.01);
  EXPECT_DOUBLE_EQ(lift_off.z(), 0.0);
  EXPECT_NEAR(swing_trajectory(0.25, c).z(), 0.0282842712474619, 1e-15);
}

TEST(Trajectory, StanceExamplesAndSeams)
{
  GaitCommand c = trotting(0.06);
  EXPECT_TRUE(stance_trajectory(0.5, c).isZero(1e-15));
  EXPECT_DOUBLE_EQ(stance_trajectory(0.0, c).x(), 0.03);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  const double before = std::nextafter(1.0, 0.0);
  for (int i = 0; i < 200; ++i) {
    GaitCommand r = GaitLimits{}.clamp(
        {GaitPattern::Trot, 0.1 * u(rng), 0.06 * u(rng), 0.08 * std::abs(u(rng)),
         0.02 * std::abs(u(rng)), SideWalkMode::Linear, 0.8});
    EXPECT_LE((stance_trajectory(before, r) - swing_trajectory(0.0, r)).norm(), 1e-9);
    EXPECT_LE((swing_trajectory(before, r) - stance_trajectory(0.0, r)).norm(), 1e-9);
  }
}

TEST(Steering, LinearIsUniform)
{
  const GaitPlanner g = planner();
  GaitCommand c = trotting(0.03, 0.01);
  const Vec3 base{0.03, 0.01, 0.0};
  for (LegId leg : kAllLegs) {
    EXPECT_TRUE(g.steer_displacement(leg, base, c) == base);
  }
}

TEST(Steering, RotationIsPureSpin)
{
  const GaitPlanner g = planner();
  GaitCommand c = trotting(0.0, 0.04);
  c.side_walk_mode = SideWalkMode::Rotation;
  const Vec3 base = swing_trajectory(0.999, c);  // near +step/2
  double mean = 0.0;
  std::array<Vec3, 4> d;
  for (LegId leg : kAllLegs) {
    d[index(leg)] = g.steer_displacement(leg, base, c);
    mean += d[index(leg)].head<2>().norm();
    // Tangent is perpendicular to the neutral radius.
    const Vec2 r = kRobot.neutral_foot(leg).head<2>();
    EXPECT_NEAR(d[index(leg)].head<2>().dot(r), 0.0, 1e-15);
  }
  EXPECT_NEAR(mean / 4.0, std::abs(base.y()), 1e-15);
  const double fl = d[index(LegId::FL)].x(), bl = d[index(LegId::BL)].x();
  const double fr = d[index(LegId::FR)].x(), br = d[index(LegId::BR)].x();
  EXPECT_LT(fl, 0.0);
  EXPECT_LT(bl, 0.0);
  EXPECT_GT(fr, 0.0);
  EXPECT_GT(br, 0.0);

  c.step_length_y = 0.0;
  for (LegId leg : kAllLegs) {
    EXPECT_TRUE(g.steer_displacement(leg, swing_trajectory(0.3, c), c).head<2>().isZero(0.0));
  }
}

TEST(PlanTrot, PanelSequence)
{
  const GaitPlanner g = planner();
  const GaitCommand c = trotting(0.04);
  auto stance = [&](double phase, LegId leg) { return g.plan_trot(phase, c).stance[index(leg)]; };

  // (b) BL and FR swing while BR and FL stand.
  EXPECT_FALSE(stance(0.25, LegId::BL));
  EXPECT_FALSE(stance(0.25, LegId::FR));
  EXPECT_TRUE(stance(0.25, LegId::BR));
  EXPECT_TRUE(stance(0.25, LegId::FL));
  // Mirrored half cycle.
  EXPECT_FALSE(stance(0.75, LegId::BR));
  EXPECT_FALSE(stance(0.75, LegId::FL));
  EXPECT_TRUE(stance(0.75, LegId::BL));
  EXPECT_TRUE(stance(0.75, LegId::FR));

  // (a), (c), (d), (f): every foot on the ground at the segment boundaries.
  const double before_half = std::nextafter(0.5, 0.0);
  const double before_one = std::nextafter(1.0, 0.0);
  for (double phase : {0.0, before_half, 0.5, before_one}) {
    const FootPlan p = g.plan_trot(phase, c);
    for (LegId leg : kAllLegs) EXPECT_NEAR(p.displacement[index(leg)].z(), 0.0, 1e-9);
    EXPECT_EQ(p.lateral_shift, 0.0);
  }
}

TEST(PlanTrot, PairingAtEveryPhase)
{
  const GaitPlanner g = planner();
  const GaitCommand c = trotting(0.04);
  for (int i = 0; i < 1000; ++i) {
    const FootPlan p = g.plan_trot(i / 1000.0, c);
    EXPECT_EQ(p.stance[index(LegId::FL)], p.stance[index(LegId::BR)]);
    EXPECT_EQ(p.stance[index(LegId::FR)], p.stance[index(LegId::BL)]);
    EXPECT_NE(p.stance[index(LegId::FL)], p.stance[index(LegId::FR)]);
  }
}

TEST(PlanWalk, PanelSequenceAndLean)
{
  const GaitPlanner g = planner();
  const GaitCommand c = walking(0.04);

  FootPlan p = g.plan_walk(0.125, c);
  EXPECT_FALSE(p.stance[index(LegId::BR)]);
  EXPECT_TRUE(p.stance[index(LegId::FR)]);
  EXPECT_TRUE(p.stance[index(LegId::BL)]);
  EXPECT_TRUE(p.stance[index(LegId::FL)]);
  EXPECT_GT(p.lateral_shift, 0.0);

  p = g.plan_walk(0.625, c);
  EXPECT_FALSE(p.stance[index(LegId::BL)]);
  EXPECT_EQ(std::count(p.stance.begin(), p.stance.end(), true), 3);
  EXPECT_LT(p.lateral_shift, 0.0);

  // Swing order BR -> FR -> BL -> FL, one at a time.
  const LegId order[] = {LegId::BR, LegId::FR, LegId::BL, LegId::FL};
  for (int q = 0; q < 4; ++q) {
    p = g.plan_walk(q * 0.25 + 0.2, c);
    for (LegId leg : kAllLegs) EXPECT_EQ(p.stance[index(leg)], leg != order[q]);
  }
}

TEST(PlanWalk, StaticallyStableEverywhere)
{
  // Default lean keeps the CoM inside the support triangle over this command envelope.
  const GaitPlanner g = planner();
  for (double sx : {-0.06, -0.04, 0.0, 0.04, 0.06, 0.10}) {
    for (double sy : {0.0, 0.03, -0.03}) {
      for (SideWalkMode mode : {SideWalkMode::Linear, SideWalkMode::Rotation}) {
        GaitCommand c = walking(sx, sy, 0.04);
        c.side_walk_mode = mode;
        double worst = 1.0;
        for (int i = 0; i < 4000; ++i) {
          const FootPlan p = g.plan_walk(i / 4000.0, c);
          EXPECT_GE(std::count(p.stance.begin(), p.stance.end(), true), 3);
          worst = std::min(worst, g.plan_margin(p));
        }
        EXPECT_GT(worst, 0.0) << sx << " " << sy << " " << to_string(mode);
      }
    }
  }
}

TEST(Plan, ContinuityAcrossSeams)
{
  const GaitPlanner g = planner();
  for (const GaitCommand& c : {trotting(0.08, 0.03, 0.05), walking(0.06, -0.02, 0.03)}) {
    // Seams are approached from both sides.
    for (double seam : {0.0, 0.1, 0.25, 0.35, 0.5, 0.6, 0.75, 0.85, 1.0}) {
      const FootPlan a = g.plan(seam - 1e-12, c);
      const FootPlan b = g.plan(seam, c);
      for (LegId leg : kAllLegs) {
        EXPECT_LE((a.displacement[index(leg)] - b.displacement[index(leg)]).norm(), 1e-9);
      }
      EXPECT_LE(std::abs(a.lateral_shift - b.lateral_shift), 1e-9);
    }
    // Dense sweep: no sample-to-sample jump above 1e-6 m.
    double prev_shift = g.plan(0.0, c).lateral_shift;
    FootPlan prev = g.plan(0.0, c);
    const int n = 1000000;
    for (int i = 1; i <= n; ++i) {
      const FootPlan p = g.plan(i / double(n), c);
      for (LegId leg : kAllLegs) {
        const Vec3 a = prev.displacement[index(leg)] - Vec3{0, prev.lateral_shift, 0};
        const Vec3 b = p.displacement[index(leg)] - Vec3{0, p.lateral_shift, 0};
        ASSERT_LE((a - b).norm(), 1e-6) << "phase " << i / double(n);
      }
      ASSERT_LE(std::abs(p.lateral_shift - prev_shift), 1e-6);
      prev = p;
      prev_shift = p.lateral_shift;
    }
  }
}

TEST(Plan, ZeroCommandIsNeutral)
{
  const GaitPlanner g = planner();
  for (GaitPattern pattern : {GaitPattern::Trot, GaitPattern::Walk}) {
    GaitCommand c;
    c.pattern = pattern;
    for (int i = 0; i < 500; ++i) {
      const FootPlan p = g.plan(i / 500.0, c);
      for (const Vec3& d : p.displacement) EXPECT_TRUE(d.isZero(0.0));
      EXPECT_EQ(p.lateral_shift, 0.0);
    }
  }
}

TEST(Plan, Periodicity)
{
  const GaitPlanner g = planner();
  for (const GaitCommand& c : {trotting(0.05, 0.02), walking(0.05, 0.02)}) {
    for (int i = 0; i < 1024; ++i) {
      const double phase = i / 1024.0;  // exactly representable, as is phase + 1
      const FootPlan a = g.plan(phase, c);
      const FootPlan b = g.plan(phase + 1.0, c);
      EXPECT_EQ(a.displacement, b.displacement);
      EXPECT_EQ(a.stance, b.stance);
      EXPECT_EQ(a.lateral_shift, b.lateral_shift);
    }
  }
}

TEST(ComMargin, Examples)
{
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(com_margin(square, {0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(com_margin(square, {1.0, 0.3}), 0.0);
  const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_DOUBLE_EQ(com_margin(tri, {0.25, 0.25}), 0.25);
  EXPECT_DOUBLE_EQ(com_margin(tri, {-1.0, 0.0}), -1.0);

  const std::vector<Vec2> two{{0, 0}, {1, 0}};
  EXPECT_THROW(com_margin(two, {0, 0}), DegenerateSupport);
}

TEST(ComMargin, MatchesBruteForce)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<Vec2> pts;
    const int n = 3 + i % 2;
    for (int k = 0; k < n; ++k) pts.emplace_back(u(rng), u(rng));
    const Vec2 c{u(rng), u(rng)};
    EXPECT_NEAR(com_margin(pts, c), oracle_margin(pts, c), 1e-4);
  }
}

TEST(GaitLimits, ClampTable)
{
  const GaitLimits lim;
  GaitCommand c;
  c.step_length_x = 0.5;
  c.step_length_y = -0.5;
  c.swing_height = -1;
  c.stance_depth = 1;
  c.cycle_period = 0;
  const GaitCommand k = lim.clamp(c);
  EXPECT_EQ(k.step_length_x, 0.10);
  EXPECT_EQ(k.step_length_y, -0.06);
  EXPECT_EQ(k.swing_height, 0.0);
  EXPECT_EQ(k.stance_depth, 0.02);
  EXPECT_EQ(k.cycle_period, lim.min_cycle_period);
  EXPECT_TRUE(lim.admits(k));
  EXPECT_FALSE(lim.admits(c));
}

TEST(GaitParams, RejectsLeanRampOutsideWindow)
{
  GaitParams p;
  p.lean_ramp = 0.2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = GaitParams{};
  p.walk_duty = 0.75;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
