#include "pawsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "json_codec.hpp"

namespace pawsim {

namespace {

// Tolerance when matching keyframe times to tick start times.
constexpr double kTimeSlack = 1e-9;

const char* const kLegNames[4] = {"fl", "fr", "bl", "br"};
const char* const kJointNames[3] = {"hip", "upper", "lower"};

}  // namespace

void Scenario::validate() const
{
  if (!std::isfinite(duration) || duration < 0.0) {
    throw std::invalid_argument("duration: must be non-negative");
  }
  double prev = -1.0;
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const double t = keyframes[i].time;
    if (!std::isfinite(t) || t < 0.0) {
      throw std::invalid_argument(fmt::format("keyframes[{}].time: must be non-negative", i));
    }
    if (!(t > prev)) {
      throw std::invalid_argument(fmt::format("keyframes[{}].time: must be strictly increasing", i));
    }
    prev = t;
  }
  if (!keyframes.empty() && duration < keyframes.back().time) {
    throw std::invalid_argument("duration: shorter than the last keyframe time");
  }
}

Scenario parse_scenario(std::string_view json_text, const GaitDefaults& defaults)
{
  using nlohmann::json;
  const json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::invalid_argument("scenario: not a JSON object");
  }
  Scenario s;
  const auto duration = doc.find("duration");
  if (duration == doc.end() || !duration->is_number()) {
    throw std::invalid_argument("duration: expected a number");
  }
  s.duration = duration->get<double>();
  if (const auto kfs = doc.find("keyframes"); kfs != doc.end()) {
    if (!kfs->is_array()) throw std::invalid_argument("keyframes: expected an array");
    for (std::size_t i = 0; i < kfs->size(); ++i) {
      const json& kf = (*kfs)[i];
      const auto time = kf.is_object() ? kf.find("time") : kf.end();
      const auto cmd = kf.is_object() ? kf.find("command") : kf.end();
      if (time == kf.end() || !time->is_number() || cmd == kf.end() || !cmd->is_object()) {
        throw std::invalid_argument(
            fmt::format("keyframes[{}]: expected {{\"time\": s, \"command\": {{...}}}}", i));
      }
      try {
        s.keyframes.push_back({time->get<double>(), command_from(*cmd, defaults)});
      } catch (const std::exception& e) {
        throw std::invalid_argument(fmt::format("keyframes[{}].command: {}", i, e.what()));
      }
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const GaitDefaults& defaults)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), defaults);
}

std::string csv_header()
{
  std::string out = "time";
  for (const char* prefix : {"cmd", "sim"}) {
    for (const char* leg : kLegNames) {
      for (const char* joint : kJointNames) out += fmt::format(",{}_{}_{}", prefix, leg, joint);
    }
  }
  out += ",odom_x,odom_y,odom_heading";
  for (const char* leg : kLegNames) out += fmt::format(",stance_{}", leg);
  out += ",com_margin";
  return out;
}

std::string csv_row(double time, const TickSample& sample)
{
  const RobotState& s = sample.state;
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}", time);
  for (double q : sample.frame.joints) fmt::format_to(std::back_inserter(buf), ",{}", q);
  for (double q : s.joints) fmt::format_to(std::back_inserter(buf), ",{}", q);
  fmt::format_to(std::back_inserter(buf), ",{},{},{}", s.odometry.x, s.odometry.y,
                 s.odometry.heading);
  for (bool b : s.stance) fmt::format_to(std::back_inserter(buf), ",{}", b ? 1 : 0);
  if (s.com_margin) {
    fmt::format_to(std::back_inserter(buf), ",{}", *s.com_margin);
  } else {
    buf.push_back(',');
  }
  return fmt::to_string(buf);
}

ScenarioSummary run_scenario(const Config& config, const Scenario& scenario, std::ostream& out)
{
  scenario.validate();
  ControlLoop loop(config);
  auto recorder = loop.telemetry().subscribe(1);

  const double rate = config.controller.rate_hz;
  const auto ticks = static_cast<std::uint64_t>(std::llround(scenario.duration * rate));

  out << csv_header() << '\n';
  ScenarioSummary summary;
  std::size_t next = 0;
  Pose2 prev_odom = loop.simulator().state().odometry;
  for (std::uint64_t i = 0; i < ticks; ++i) {
    const double start = static_cast<double>(i) / rate;
    while (next < scenario.keyframes.size() && scenario.keyframes[next].time <= start + kTimeSlack) {
      loop.mailbox().post(scenario.keyframes[next].command, next + 1);
      ++next;
    }
    loop.step();

    const std::optional<TickSample> sample = recorder->try_pop();
    const RobotState& s = sample->state;
    out << csv_row(static_cast<double>(i + 1) / rate, *sample) << '\n';

    summary.distance += std::hypot(s.odometry.x - prev_odom.x, s.odometry.y - prev_odom.y);
    prev_odom = s.odometry;
    if (s.com_margin) {
      summary.min_com_margin =
          summary.min_com_margin ? std::min(*summary.min_com_margin, *s.com_margin) : *s.com_margin;
    }
    summary.ik_failures += sample->frame.diagnostics.size();
    const int stance = static_cast<int>(std::count(s.stance.begin(), s.stance.end(), true));
    summary.min_stance_feet = std::min(summary.min_stance_feet, stance);
  }
  summary.ticks = ticks;
  out.flush();
  if (!out) throw IoError("failed to write telemetry");
  return summary;
}

ScenarioSummary run_scenario(const Config& config, const Scenario& scenario,
                             const std::filesystem::path& out_path)
{
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_path.string() + " for writing");
  return run_scenario(config, scenario, out);
}

}  // namespace pawsim
