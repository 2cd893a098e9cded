#pragma once

#include <cstdint>

#include "pawsim/config.hpp"
#include "pawsim/controller.hpp"
#include "pawsim/mailbox.hpp"
#include "pawsim/protocol.hpp"
#include "pawsim/simulator.hpp"

namespace pawsim {

/// One control tick: the controller frame and the simulated state after it.
struct TickSample
{
  JointCommandFrame frame;
  RobotState state;
  std::uint64_t command_seq = 0;
};

StateMsg make_state_message(const TickSample& sample);

/// The closed loop shared by the live server and headless scenarios. Reads the latest command
/// from the mailbox, runs one controller tick and the simulator substeps, and publishes the
/// result. Not thread-safe; the mailbox and the broadcast are.
class ControlLoop
{
public:
  explicit ControlLoop(const Config& config);

  const TickSample& step();

  CommandMailbox& mailbox() { return mailbox_; }
  Broadcast<TickSample>& telemetry() { return telemetry_; }

  const Config& config() const { return config_; }
  const Controller& controller() const { return controller_; }
  const Simulator& simulator() const { return simulator_; }
  const TickSample& last() const { return last_; }
  std::uint64_t ticks() const { return ticks_; }
  /// Time at the end of the last tick, computed as ticks / rate.
  double time() const;

private:
  Config config_;
  Controller controller_;
  Simulator simulator_;
  CommandMailbox mailbox_;
  Broadcast<TickSample> telemetry_;
  TickSample last_;
  std::uint64_t ticks_ = 0;
};

}  // namespace pawsim
