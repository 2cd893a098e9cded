#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pawsim/config.hpp"
#include "pawsim/controller.hpp"
#include "pawsim/simulator.hpp"

namespace pawsim {

inline constexpr std::string_view kProtocolVersion = "1";

/// Teleop command from a client.
struct CmdMsg
{
  TeleopCommand command;

  bool operator==(const CmdMsg&) const = default;
};

/// Snapshot of the loop after a control tick.
struct StateMsg
{
  RobotState state;
  ControllerMode mode = ControllerMode::Idle;
  double gait_phase = 0.0;
  std::array<double, kJointCount> commanded_joints{};
  std::vector<LegDiagnostic> diagnostics;
  /// Sequence number of the command the controller used for this tick, 0 before any.
  std::uint64_t command_seq = 0;

  bool operator==(const StateMsg&) const = default;
};

struct PingMsg
{
  double client_time = 0.0;

  bool operator==(const PingMsg&) const = default;
};

struct PongMsg
{
  double client_time = 0.0;

  bool operator==(const PongMsg&) const = default;
};

struct ErrMsg
{
  std::string code;
  std::string message;

  bool operator==(const ErrMsg&) const = default;
};

using MessageBody = std::variant<CmdMsg, StateMsg, PingMsg, PongMsg, ErrMsg>;

struct WireMessage
{
  std::uint64_t seq = 0;
  MessageBody body;

  bool operator==(const WireMessage&) const = default;
};

std::string_view type_name(const MessageBody& body);

/// Thrown by decode. code() is one of: malformed, version, type, field.
class ProtocolError : public std::runtime_error
{
public:
  ProtocolError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code))
  {
  }
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

/// One JSON object, UTF-8, no trailing newline. Non-finite numbers throw std::invalid_argument.
std::string encode(const WireMessage& message);

/// Parses one message. Command fields that are absent take values from `defaults`; an absent
/// cycle_period takes the default of the command's pattern.
WireMessage decode(std::string_view text, const GaitDefaults& defaults = {});

/// Command object as used inside a cmd message and in scenario keyframes.
TeleopCommand command_from_json_text(std::string_view text, const GaitDefaults& defaults = {});

}  // namespace pawsim
