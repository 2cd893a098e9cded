#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pawsim/simulator.hpp"

namespace pawsim {
namespace {

constexpr double kDt = 0.01;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Servo, RateLimitedStep)
{
  const Interval wide{-10.0, 10.0};
  EXPECT_NEAR(servo_step(0.0, 0.5, kDt, 7.0, wide), 0.07, 1e-15);
  EXPECT_NEAR(servo_step(0.0, -0.5, kDt, 7.0, wide), -0.07, 1e-15);
  EXPECT_EQ(servo_step(0.0, 0.05, kDt, 7.0, wide), 0.05);
  EXPECT_EQ(servo_step(0.3, 0.37, kDt, 7.0, wide), 0.37);
  EXPECT_EQ(servo_step(0.0, 3.0, kDt, kInf, wide), 3.0);
}

TEST(Servo, ClampsToLimits)
{
  const Interval lim{deg2rad(30.0), deg2rad(130.0)};
  EXPECT_EQ(servo_step(deg2rad(129.9), deg2rad(150.0), kDt, 7.0, lim), deg2rad(130.0));
  EXPECT_EQ(servo_step(0.0, 0.0, kDt, 7.0, lim), deg2rad(30.0));
}

TEST(Servo, ReachesCommandInPredictedSteps)
{
  const Interval wide{-10.0, 10.0};
  double q = 0.0;
  int steps = 0;
  while (q != 0.5 && steps < 100) {
    q = servo_step(q, 0.5, kDt, 7.0, wide);
    ++steps;
  }
  EXPECT_EQ(steps, 8);  // ceil(0.5 / 0.07)
}

std::vector<Vec2> transform(const std::vector<Vec2>& pts, double theta, const Vec2& t)
{
  const Eigen::Rotation2Dd r(theta);
  std::vector<Vec2> out;
  for (const Vec2& p : pts) out.push_back(r * p + t);
  return out;
}

const std::vector<Vec2> kFeet{{0.12, 0.159}, {0.12, -0.159}, {-0.12, 0.159}, {-0.12, -0.159}};

TEST(Odometry, PureTranslation)
{
  const std::vector<Vec2> prev = transform(kFeet, 0.0, {0.01, -0.002});
  const PlanarMotion m = fit_planar_motion(prev, kFeet);
  EXPECT_NEAR(m.rotation, 0.0, 1e-15);
  EXPECT_NEAR(m.translation.x(), 0.01, 1e-15);
  EXPECT_NEAR(m.translation.y(), -0.002, 1e-15);
}

TEST(Odometry, PureRotation)
{
  const std::vector<Vec2> prev = transform(kFeet, 0.03, Vec2::Zero());
  const PlanarMotion m = fit_planar_motion(prev, kFeet);
  EXPECT_NEAR(m.rotation, 0.03, 1e-14);
  EXPECT_NEAR(m.translation.norm(), 0.0, 1e-14);
}

TEST(Odometry, SingleFootIsTranslationOnly)
{
  const std::vector<Vec2> cur{{0.1, 0.2}};
  const std::vector<Vec2> prev{{0.13, 0.18}};
  const PlanarMotion m = fit_planar_motion(prev, cur);
  EXPECT_EQ(m.rotation, 0.0);
  EXPECT_NEAR(m.translation.x(), 0.03, 1e-15);
  EXPECT_NEAR(m.translation.y(), -0.02, 1e-15);
}

TEST(Odometry, EmptyAndMismatchedInputs)
{
  EXPECT_THROW(fit_planar_motion(std::vector<Vec2>{}, std::vector<Vec2>{}), NoStanceFeet);
  EXPECT_THROW(fit_planar_motion(kFeet, std::vector<Vec2>{kFeet[0]}), std::invalid_argument);
}

// Residual of the best translation for a fixed rotation.
double residual(const std::vector<Vec2>& prev, const std::vector<Vec2>& cur, double theta)
{
  Vec2 cp = Vec2::Zero(), cc = Vec2::Zero();
  for (std::size_t i = 0; i < prev.size(); ++i) {
    cp += prev[i];
    cc += cur[i];
  }
  cp /= prev.size();
  cc /= cur.size();
  const double c = std::cos(theta), s = std::sin(theta);
  double sum = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const Vec2 a = cur[i] - cc;
    const Vec2 rotated{c * a.x() - s * a.y(), s * a.x() + c * a.y()};
    sum += (prev[i] - cp - rotated).squaredNorm();
  }
  return sum;
}

double grid_best_rotation(const std::vector<Vec2>& prev, const std::vector<Vec2>& cur)
{
  double lo = -std::numbers::pi, hi = std::numbers::pi, best = 0.0;
  for (int pass = 0; pass < 8; ++pass) {
    const int n = 400;
    double best_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      const double th = lo + (hi - lo) * i / n;
      const double r = residual(prev, cur, th);
      if (r < best_r) {
        best_r = r;
        best = th;
      }
    }
    const double half = 2.0 * (hi - lo) / n;
    lo = best - half;
    hi = best + half;
  }
  return best;
}

TEST(Odometry, MatchesGridSearchOracle)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.002);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    std::vector<Vec2> cur;
    for (std::size_t i = 0; i < n; ++i) cur.push_back({0.2 * u(rng), 0.2 * u(rng)});
    const double theta = 0.5 * u(rng);
    const Vec2 t{0.05 * u(rng), 0.05 * u(rng)};
    std::vector<Vec2> prev = transform(cur, theta, t);
    for (Vec2& p : prev) p += Vec2{noise(rng), noise(rng)};

    const PlanarMotion m = fit_planar_motion(prev, cur);
    const double oracle = grid_best_rotation(prev, cur);
    EXPECT_NEAR(m.rotation, oracle, 1e-6) << "trial " << trial;
    EXPECT_LE(residual(prev, cur, m.rotation), residual(prev, cur, oracle) + 1e-15);
  }
}

TEST(Odometry, ComposeRotatesIntoWorld)
{
  const Pose2 start{1.0, 2.0, std::numbers::pi / 2};
  const Pose2 out = compose(start, {{0.1, 0.0}, 0.2});
  EXPECT_NEAR(out.x, 1.0, 1e-15);
  EXPECT_NEAR(out.y, 2.1, 1e-15);
  EXPECT_NEAR(out.heading, std::numbers::pi / 2 + 0.2, 1e-15);
  EXPECT_NEAR(compose({0, 0, 3.1}, {{0, 0}, 0.1}).heading, 3.2 - 2 * std::numbers::pi, 1e-12);
}

TEST(Simulator, RejectsBadConfig)
{
  SimulatorConfig cfg;
  cfg.servo.max_speed = 0.0;
  EXPECT_THROW(Simulator{cfg}, std::invalid_argument);
  cfg = SimulatorConfig{};
  cfg.contact_epsilon = -1.0;
  EXPECT_THROW(Simulator{cfg}, std::invalid_argument);
}

struct Rig
{
  Controller controller;
  Simulator sim;

  explicit Rig(double joint_speed = 7.0, double servo_speed = 7.0)
      : controller(make_controller(joint_speed)), sim(make_sim(servo_speed))
  {
    controller.initialize();
    sim.reset(controller.joints(), BodyPose{controller.config().sit_height});
  }

  static Controller make_controller(double speed)
  {
    ControllerConfig cfg;
    cfg.max_joint_speed = speed;
    return Controller(cfg);
  }
  static Simulator make_sim(double speed)
  {
    SimulatorConfig cfg;
    cfg.servo.max_speed = speed;
    return Simulator(cfg);
  }

  const RobotState& tick(const TeleopCommand& cmd, JointCommandFrame* out = nullptr)
  {
    JointCommandFrame f = controller.tick(cmd, kDt);
    const RobotState& s = sim.step(f, kDt);
    if (out != nullptr) *out = std::move(f);
    return s;
  }
};

TeleopCommand gait_cmd(GaitPattern pattern, double step_x, double step_y, double swing,
                       double period, SideWalkMode mode = SideWalkMode::Linear)
{
  TeleopCommand c;
  c.start = true;
  c.walk = true;
  c.gait.pattern = pattern;
  c.gait.step_length_x = step_x;
  c.gait.step_length_y = step_y;
  c.gait.swing_height = swing;
  c.gait.cycle_period = period;
  c.gait.side_walk_mode = mode;
  return c;
}

TeleopCommand standing()
{
  TeleopCommand c;
  c.start = true;
  return c;
}

TEST(Simulator, ResetPutsFeetOnTheGround)
{
  Rig rig;
  const RobotState& s = rig.sim.state();
  for (std::size_t i = 0; i < kLegCount; ++i) {
    EXPECT_NEAR(s.feet_body[i].z(), 0.0, 1e-12);
    EXPECT_TRUE(s.stance[i]);
  }
  ASSERT_TRUE(s.com_margin.has_value());
  EXPECT_GT(*s.com_margin, 0.1);
  EXPECT_EQ(s.odometry, Pose2{});
}

TEST(Simulator, JointVelocitiesMatchServoSteps)
{
  Rig rig;
  const std::array<double, kJointCount> before = rig.sim.state().joints;
  const RobotState& s = rig.tick(standing());
  for (std::size_t j = 0; j < kJointCount; ++j) {
    EXPECT_NEAR(s.joint_velocities[j], (s.joints[j] - before[j]) / kDt, 1e-9);
    EXPECT_LE(std::abs(s.joint_velocities[j]), 7.0 + 1e-9);
  }
}

TEST(Simulator, TwinMatchesPlanWithIdealServos)
{
  Rig rig(kInf, kInf);
  double worst = 0.0;
  std::vector<TeleopCommand> schedule;
  for (int i = 0; i < 150; ++i) schedule.push_back(standing());
  for (int i = 0; i < 800; ++i) schedule.push_back(gait_cmd(GaitPattern::Trot, 0.04, 0.0, 0.04, 0.8));
  for (int i = 0; i < 1600; ++i) schedule.push_back(gait_cmd(GaitPattern::Walk, 0.04, 0.0, 0.03, 1.6));
  for (int i = 0; i < 800; ++i) {
    TeleopCommand c = gait_cmd(GaitPattern::Trot, 0.03, 0.02, 0.04, 0.8, SideWalkMode::Rotation);
    c.body.roll = deg2rad(10.0);
    c.body.pitch = deg2rad(-8.0);
    c.body.yaw = deg2rad(5.0);
    schedule.push_back(c);
  }
  for (const TeleopCommand& cmd : schedule) {
    JointCommandFrame f;
    const RobotState& s = rig.tick(cmd, &f);
    ASSERT_TRUE(f.diagnostics.empty()) << "tick " << f.tick;
    ASSERT_EQ(s.joints, f.joints);
    for (std::size_t i = 0; i < kLegCount; ++i) {
      worst = std::max(worst, (s.feet_body[i] - f.planned_feet[i]).norm());
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Simulator, Causal)
{
  Rig a, b;
  for (int i = 0; i < 300; ++i) {
    const TeleopCommand cmd = i < 150 ? standing() : gait_cmd(GaitPattern::Trot, 0.04, 0, 0.04, 0.8);
    a.tick(cmd);
    b.tick(cmd);
  }
  const RobotState snapshot = a.sim.state();
  EXPECT_EQ(b.sim.state().joints, snapshot.joints);
  EXPECT_EQ(b.sim.state().odometry, snapshot.odometry);
  // Diverging future commands leave the past untouched and the present identical.
  a.tick(gait_cmd(GaitPattern::Trot, 0.08, 0, 0.04, 0.8));
  b.tick(standing());
  EXPECT_NE(a.sim.state().joints, b.sim.state().joints);
  EXPECT_EQ(snapshot.tick, 300u);
}

TEST(Simulator, Deterministic)
{
  Rig a, b;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TeleopCommand cmd = gait_cmd(GaitPattern::Trot, 0.04, 0.0, 0.04, 0.8);
  for (int i = 0; i < 3000; ++i) {
    if (i % 200 == 0) {
      cmd.gait.step_length_x = 0.08 * u(rng);
      cmd.gait.step_length_y = 0.04 * u(rng);
      cmd.body.yaw = 0.3 * u(rng);
    }
    const RobotState& sa = a.tick(cmd);
    const RobotState& sb = b.tick(cmd);
    ASSERT_EQ(sa.joints, sb.joints);
    ASSERT_EQ(sa.odometry, sb.odometry);
    ASSERT_EQ(sa.com_margin, sb.com_margin);
  }
}

// Stance feet sweep step_x backward over duty * period, so the body covers step_x / duty
// per cycle.
TEST(Simulator, TrotOdometryPerCycle)
{
  Rig rig;
  const TeleopCommand cmd = gait_cmd(GaitPattern::Trot, 0.04, 0.0, 0.04, 0.8);
  for (int i = 0; i < 150; ++i) rig.tick(standing());
  for (int i = 0; i < 400; ++i) rig.tick(cmd);
  const Pose2 start = rig.sim.state().odometry;
  for (int i = 0; i < 400; ++i) rig.tick(cmd);
  const Pose2 end = rig.sim.state().odometry;
  const double per_cycle = (end.x - start.x) / 5.0;
  EXPECT_NEAR(per_cycle, 0.04 / 0.5, 1e-9);
  EXPECT_NEAR(end.y - start.y, 0.0, 1e-12);
  EXPECT_NEAR(end.heading - start.heading, 0.0, 1e-12);
}

TEST(Simulator, SteeringDirections)
{
  auto drift = [](const TeleopCommand& cmd) {
    Rig rig;
    for (int i = 0; i < 150; ++i) rig.tick(standing());
    for (int i = 0; i < 800; ++i) rig.tick(cmd);
    return rig.sim.state().odometry;
  };
  const Pose2 back = drift(gait_cmd(GaitPattern::Trot, -0.04, 0.0, 0.04, 0.8));
  EXPECT_LT(back.x, -0.2);
  const Pose2 left = drift(gait_cmd(GaitPattern::Trot, 0.0, 0.03, 0.04, 0.8));
  EXPECT_GT(left.y, 0.1);
  EXPECT_NEAR(left.heading, 0.0, 1e-9);
  const Pose2 ccw =
      drift(gait_cmd(GaitPattern::Trot, 0.0, 0.03, 0.04, 0.8, SideWalkMode::Rotation));
  EXPECT_GT(ccw.heading, 0.2);
  EXPECT_LT(std::hypot(ccw.x, ccw.y), 0.02);
}

TEST(Simulator, WalkKeepsThreeFeetDownWithPositiveMargin)
{
  Rig rig;
  const TeleopCommand cmd = gait_cmd(GaitPattern::Walk, 0.04, 0.0, 0.03, 1.6);
  double min_margin = kInf;
  int min_stance = 4;
  for (int i = 0; i < 1000; ++i) {
    const RobotState& s = rig.tick(i < 150 ? standing() : cmd);
    const int n = static_cast<int>(std::count(s.stance.begin(), s.stance.end(), true));
    min_stance = std::min(min_stance, n);
    ASSERT_TRUE(s.com_margin.has_value()) << "tick " << i;
    min_margin = std::min(min_margin, *s.com_margin);
  }
  EXPECT_GE(min_stance, 3);
  EXPECT_GT(min_margin, 0.0);
  EXPECT_GT(rig.sim.state().odometry.x, 0.1);
}

TEST(Simulator, AirborneFreezesOdometry)
{
  Simulator sim{SimulatorConfig{}};
  Controller c{ControllerConfig{}};
  c.initialize();
  sim.reset(c.joints(), BodyPose{0.10});
  JointCommandFrame f;
  f.joints = c.joints();
  f.body = BodyPose{0.20};  // body lifted above the sit-height leg reach
  const RobotState& s = sim.step(f, kDt);
  EXPECT_TRUE(s.odometry_frozen);
  EXPECT_EQ(s.odometry, Pose2{});
  EXPECT_FALSE(s.com_margin.has_value());
  EXPECT_EQ(std::count(s.stance.begin(), s.stance.end(), true), 0);
}

}  // namespace
}  // namespace pawsim
