#include "pawsim/loop.hpp"

namespace pawsim {

StateMsg make_state_message(const TickSample& sample)
{
  StateMsg m;
  m.state = sample.state;
  m.mode = sample.frame.mode;
  m.gait_phase = sample.frame.gait_phase;
  m.commanded_joints = sample.frame.joints;
  m.diagnostics = sample.frame.diagnostics;
  m.command_seq = sample.command_seq;
  return m;
}

ControlLoop::ControlLoop(const Config& config)
    : config_((config.validate(), config)),
      controller_(config_.controller),
      simulator_(config_.simulator_config()),
      mailbox_(config_.gait_defaults.command())
{
  controller_.initialize();
  simulator_.reset(controller_.joints(), BodyPose{config_.controller.sit_height});
  last_.state = simulator_.state();
  last_.frame.joints = controller_.joints();
}

double ControlLoop::time() const
{
  return static_cast<double>(ticks_) / config_.controller.rate_hz;
}

const TickSample& ControlLoop::step()
{
  const CommandMailbox::Entry cmd = mailbox_.snapshot();
  const double dt = config_.control_dt();
  last_.frame = controller_.tick(cmd.command, dt);
  const int substeps = config_.substeps();
  for (int i = 0; i < substeps; ++i) simulator_.step(last_.frame, config_.simulation.dt);
  last_.state = simulator_.state();
  last_.command_seq = cmd.seq;
  ++ticks_;
  telemetry_.publish(last_);
  return last_;
}

}  // namespace pawsim
