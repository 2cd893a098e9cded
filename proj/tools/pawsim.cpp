// pawsim command-line entry point: serve, run, check-config, ik.
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pawsim/config.hpp"
#include "pawsim/kinematics.hpp"
#include "pawsim/scenario.hpp"
#include "pawsim/server.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

pawsim::Config config_from(const std::string& path)
{
  return path.empty() ? pawsim::default_config() : pawsim::load_config(path);
}

int cmd_serve(const std::string& config_path, std::optional<int> port)
{
  const pawsim::Config config = config_from(config_path);
  pawsim::TeleopServer server(config, port);
  server.start();
  fmt::print("listening on port {} (control {} Hz, state {} Hz)\n", server.port(),
             config.controller.rate_hz, config.server.state_rate_hz);
  std::fflush(stdout);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  fmt::print("stopped after {} ticks\n", server.ticks());
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& scenario_path,
            const std::string& out_path)
{
  const pawsim::Config config = config_from(config_path);
  const pawsim::Scenario scenario = pawsim::load_scenario(scenario_path, config.gait_defaults);
  const pawsim::ScenarioSummary s = pawsim::run_scenario(config, scenario, out_path);
  fmt::print("ticks: {}\n", s.ticks);
  fmt::print("distance: {:.6f} m\n", s.distance);
  if (s.min_com_margin) {
    fmt::print("min_com_margin: {:.6f} m\n", *s.min_com_margin);
  } else {
    fmt::print("min_com_margin: none\n");
  }
  fmt::print("min_stance_feet: {}\n", s.min_stance_feet);
  fmt::print("ik_failures: {}\n", s.ik_failures);
  return 0;
}

int cmd_check(const std::string& path)
{
  const pawsim::Config config = pawsim::load_config(path);
  fmt::print("{}: ok\n", path);
  fmt::print("{}", pawsim::render_config(config));
  return 0;
}

int cmd_ik(double x, double y, double z, const std::string& leg_name,
           const std::string& config_path)
{
  const auto leg = pawsim::parse_leg(leg_name);
  if (!leg) {
    fmt::print(stderr, "unknown leg '{}', expected FL, FR, BL or BR\n", leg_name);
    return 2;
  }
  const pawsim::Config config = config_from(config_path);
  const pawsim::IkResult r = pawsim::leg_ik({x, y, z}, config.geometry().leg, *leg);
  if (!r) {
    fmt::print("{}: {}\n", leg_name, pawsim::to_string(*r.error()));
    return 1;
  }
  fmt::print("hip   {: .9f} rad {: .4f} deg\n", r->hip, pawsim::rad2deg(r->hip));
  fmt::print("upper {: .9f} rad {: .4f} deg\n", r->upper, pawsim::rad2deg(r->upper));
  fmt::print("lower {: .9f} rad {: .4f} deg\n", r->lower, pawsim::rad2deg(r->lower));
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"pawsim: quadruped kinematics, gait control and teleop simulator"};
  app.require_subcommand(1);

  std::string config_path;
  int port = -1;
  auto* serve = app.add_subcommand("serve", "run the live teleop server");
  serve->add_option("--config", config_path, "config file (built-in defaults if omitted)");
  serve->add_option("--port", port, "listen port, overrides the config")->check(CLI::Range(0, 65535));

  std::string scenario_path, out_path;
  auto* run = app.add_subcommand("run", "run a scenario headless and write CSV telemetry");
  run->add_option("--config", config_path, "config file (built-in defaults if omitted)");
  run->add_option("--scenario", scenario_path, "scenario JSON")->required();
  run->add_option("--out", out_path, "output CSV")->required();

  std::string check_path;
  auto* check = app.add_subcommand("check-config", "validate a config file and print it");
  check->add_option("path", check_path, "config file")->required();

  double x = 0, y = 0, z = 0;
  std::string leg = "FL";
  auto* ik = app.add_subcommand("ik", "solve one leg's inverse kinematics (hip frame, meters)");
  ik->add_option("--x", x)->required();
  ik->add_option("--y", y)->required();
  ik->add_option("--z", z)->required();
  ik->add_option("--leg", leg, "FL, FR, BL or BR")->capture_default_str();
  ik->add_option("--config", config_path, "config file for the leg geometry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(config_path, port >= 0 ? std::optional<int>(port) : std::nullopt);
    if (*run) return cmd_run(config_path, scenario_path, out_path);
    if (*check) return cmd_check(check_path);
    if (*ik) return cmd_ik(x, y, z, leg, config_path);
  } catch (const pawsim::ConfigParseError& e) {
    fmt::print(stderr, "config parse error: {}\n", e.what());
    return 3;
  } catch (const pawsim::ConfigValidationError& e) {
    fmt::print(stderr, "config invalid: {}\n", e.what());
    return 3;
  } catch (const pawsim::BindError& e) {
    fmt::print(stderr, "{}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
