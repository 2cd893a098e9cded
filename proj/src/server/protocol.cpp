#include "pawsim/protocol.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "json_codec.hpp"

namespace pawsim {

namespace {

using nlohmann::json;

double finite(double v)
{
  if (!std::isfinite(v)) throw std::invalid_argument("encode: non-finite number");
  return v;
}

json vec(const Vec3& v) { return json::array({finite(v.x()), finite(v.y()), finite(v.z())}); }

template <std::size_t N>
json numbers(const std::array<double, N>& a)
{
  json out = json::array();
  for (double v : a) out.push_back(finite(v));
  return out;
}

json pose_json(const BodyPose& p)
{
  return {{"height", finite(p.height)},
          {"roll", finite(p.roll)},
          {"pitch", finite(p.pitch)},
          {"yaw", finite(p.yaw)},
          {"lateral_shift", finite(p.lateral_shift)}};
}

json command_json(const TeleopCommand& c)
{
  const GaitCommand& g = c.gait;
  return {{"start", c.start},
          {"walk", c.walk},
          {"gait",
           {{"pattern", std::string(to_string(g.pattern))},
            {"step_length_x", finite(g.step_length_x)},
            {"step_length_y", finite(g.step_length_y)},
            {"swing_height", finite(g.swing_height)},
            {"stance_depth", finite(g.stance_depth)},
            {"side_walk_mode", std::string(to_string(g.side_walk_mode))},
            {"cycle_period", finite(g.cycle_period)}}},
          {"body", pose_json(c.body)},
          {"timestamp", finite(c.timestamp)}};
}

json state_json(const StateMsg& m)
{
  const RobotState& s = m.state;
  json feet = json::array();
  json feet_world = json::array();
  for (std::size_t i = 0; i < kLegCount; ++i) {
    feet.push_back(vec(s.feet_body[i]));
    feet_world.push_back(vec(s.feet_world[i]));
  }
  json diagnostics = json::array();
  for (const LegDiagnostic& d : m.diagnostics) {
    diagnostics.push_back(
        {{"leg", std::string(to_string(d.leg))}, {"error", std::string(to_string(d.error))}});
  }
  return {{"tick", s.tick},
          {"time", finite(s.time)},
          {"mode", std::string(to_string(m.mode))},
          {"gait_phase", finite(m.gait_phase)},
          {"command_seq", m.command_seq},
          {"joints", numbers(s.joints)},
          {"commanded_joints", numbers(m.commanded_joints)},
          {"joint_velocities", numbers(s.joint_velocities)},
          {"body", pose_json(s.body)},
          {"odometry", {{"x", finite(s.odometry.x)}, {"y", finite(s.odometry.y)},
                        {"heading", finite(s.odometry.heading)}}},
          {"feet", feet},
          {"feet_world", feet_world},
          {"stance", s.stance},
          {"com_margin", s.com_margin ? json(finite(*s.com_margin)) : json(nullptr)},
          {"odometry_frozen", s.odometry_frozen},
          {"diagnostics", diagnostics}};
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

[[noreturn]] void bad_field(const std::string& key, const char* what)
{
  throw ProtocolError("field", "field '" + key + "': " + what);
}

const json& require(const json& obj, const std::string& key)
{
  auto it = obj.find(key);
  if (it == obj.end()) bad_field(key, "missing");
  return *it;
}

double number_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_number()) bad_field(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad_field(key, "expected a finite number");
  return d;
}

double number_or(const json& obj, const std::string& key, double fallback)
{
  return obj.contains(key) ? number_at(obj, key) : fallback;
}

bool bool_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_boolean()) bad_field(key, "expected a boolean");
  return v.get<bool>();
}

bool bool_or(const json& obj, const std::string& key, bool fallback)
{
  return obj.contains(key) ? bool_at(obj, key) : fallback;
}

std::string string_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_string()) bad_field(key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t unsigned_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad_field(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

const json& object_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_object()) bad_field(key, "expected an object");
  return v;
}

template <std::size_t N>
std::array<double, N> numbers_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_array() || v.size() != N) bad_field(key, "wrong array length");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) bad_field(key, "expected numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

std::array<Vec3, 4> points_at(const json& obj, const std::string& key)
{
  const json& v = require(obj, key);
  if (!v.is_array() || v.size() != 4) bad_field(key, "expected four points");
  std::array<Vec3, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::array<double, 3> p = numbers_at<3>(json{{"p", v[i]}}, "p");
    out[i] = {p[0], p[1], p[2]};
  }
  return out;
}

BodyPose pose_from(const json& obj, const BodyPose& defaults)
{
  BodyPose p;
  p.height = number_or(obj, "height", defaults.height);
  p.roll = number_or(obj, "roll", defaults.roll);
  p.pitch = number_or(obj, "pitch", defaults.pitch);
  p.yaw = number_or(obj, "yaw", defaults.yaw);
  p.lateral_shift = number_or(obj, "lateral_shift", defaults.lateral_shift);
  return p;
}

}  // namespace

TeleopCommand command_from(const nlohmann::json& obj, const GaitDefaults& defaults)
{
  TeleopCommand c = defaults.command();
  c.start = bool_or(obj, "start", c.start);
  c.walk = bool_or(obj, "walk", c.walk);
  c.timestamp = number_or(obj, "timestamp", c.timestamp);
  if (obj.contains("body")) c.body = pose_from(object_at(obj, "body"), c.body);
  if (obj.contains("gait")) {
    const json& g = object_at(obj, "gait");
    GaitCommand& gc = c.gait;
    if (g.contains("pattern")) {
      const auto p = parse_gait_pattern(string_at(g, "pattern"));
      if (!p) bad_field("pattern", "expected trot or walk");
      gc.pattern = *p;
    }
    if (g.contains("side_walk_mode")) {
      const auto m = parse_side_walk_mode(string_at(g, "side_walk_mode"));
      if (!m) bad_field("side_walk_mode", "expected linear or rotation");
      gc.side_walk_mode = *m;
    }
    gc.step_length_x = number_or(g, "step_length_x", gc.step_length_x);
    gc.step_length_y = number_or(g, "step_length_y", gc.step_length_y);
    gc.swing_height = number_or(g, "swing_height", gc.swing_height);
    gc.stance_depth = number_or(g, "stance_depth", gc.stance_depth);
    gc.cycle_period = number_or(g, "cycle_period", defaults.period_for(gc.pattern));
  }
  return c;
}

namespace {

StateMsg state_from(const json& obj)
{
  StateMsg m;
  RobotState& s = m.state;
  s.tick = unsigned_at(obj, "tick");
  s.time = number_at(obj, "time");
  const auto mode = parse_controller_mode(string_at(obj, "mode"));
  if (!mode) bad_field("mode", "unknown mode");
  m.mode = *mode;
  m.gait_phase = number_at(obj, "gait_phase");
  m.command_seq = unsigned_at(obj, "command_seq");
  s.joints = numbers_at<kJointCount>(obj, "joints");
  m.commanded_joints = numbers_at<kJointCount>(obj, "commanded_joints");
  s.joint_velocities = numbers_at<kJointCount>(obj, "joint_velocities");
  s.body = pose_from(object_at(obj, "body"), BodyPose{});
  const json& odo = object_at(obj, "odometry");
  s.odometry = {number_at(odo, "x"), number_at(odo, "y"), number_at(odo, "heading")};
  s.feet_body = points_at(obj, "feet");
  s.feet_world = points_at(obj, "feet_world");
  const json& stance = require(obj, "stance");
  if (!stance.is_array() || stance.size() != 4) bad_field("stance", "expected four booleans");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!stance[i].is_boolean()) bad_field("stance", "expected four booleans");
    s.stance[i] = stance[i].get<bool>();
  }
  const json& margin = require(obj, "com_margin");
  if (!margin.is_null()) s.com_margin = number_at(obj, "com_margin");
  s.odometry_frozen = bool_at(obj, "odometry_frozen");
  const json& diags = require(obj, "diagnostics");
  if (!diags.is_array()) bad_field("diagnostics", "expected an array");
  for (const json& d : diags) {
    if (!d.is_object()) bad_field("diagnostics", "expected objects");
    const auto leg = parse_leg(string_at(d, "leg"));
    const std::string err = string_at(d, "error");
    if (!leg) bad_field("leg", "unknown leg");
    if (err == to_string(IkError::Unreachable)) {
      m.diagnostics.push_back({*leg, IkError::Unreachable});
    } else if (err == to_string(IkError::JointLimitViolation)) {
      m.diagnostics.push_back({*leg, IkError::JointLimitViolation});
    } else {
      bad_field("error", "unknown diagnostic");
    }
  }
  return m;
}

json parse_object(std::string_view text)
{
  json obj = json::parse(text.begin(), text.end(), nullptr, false);
  if (obj.is_discarded()) throw ProtocolError("malformed", "message is not valid JSON");
  if (!obj.is_object()) throw ProtocolError("malformed", "message is not a JSON object");
  return obj;
}

}  // namespace

std::string_view type_name(const MessageBody& body)
{
  static constexpr std::string_view names[] = {"cmd", "state", "ping", "pong", "err"};
  return names[body.index()];
}

std::string encode(const WireMessage& message)
{
  json out = {{"v", std::string(kProtocolVersion)},
              {"seq", message.seq},
              {"type", std::string(type_name(message.body))}};
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CmdMsg>) {
          out.update(command_json(m.command));
        } else if constexpr (std::is_same_v<T, StateMsg>) {
          out.update(state_json(m));
        } else if constexpr (std::is_same_v<T, PingMsg> || std::is_same_v<T, PongMsg>) {
          out["client_time"] = finite(m.client_time);
        } else {
          out["code"] = m.code;
          out["message"] = m.message;
        }
      },
      message.body);
  return out.dump(-1, ' ', false, json::error_handler_t::replace);
}

WireMessage decode(std::string_view text, const GaitDefaults& defaults)
{
  const json obj = parse_object(text);
  const auto v = obj.find("v");
  if (v == obj.end() || !v->is_string() || v->get<std::string>() != kProtocolVersion) {
    throw ProtocolError("version", "unsupported protocol version");
  }
  WireMessage msg;
  msg.seq = unsigned_at(obj, "seq");
  const std::string type = string_at(obj, "type");
  if (type == "cmd") {
    msg.body = CmdMsg{command_from(obj, defaults)};
  } else if (type == "state") {
    msg.body = state_from(obj);
  } else if (type == "ping") {
    msg.body = PingMsg{number_or(obj, "client_time", 0.0)};
  } else if (type == "pong") {
    msg.body = PongMsg{number_or(obj, "client_time", 0.0)};
  } else if (type == "err") {
    msg.body = ErrMsg{string_at(obj, "code"), string_at(obj, "message")};
  } else {
    throw ProtocolError("type", "unknown message type '" + type + "'");
  }
  return msg;
}

TeleopCommand command_from_json_text(std::string_view text, const GaitDefaults& defaults)
{
  return command_from(parse_object(text), defaults);
}

}  // namespace pawsim
