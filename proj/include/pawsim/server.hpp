#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>

#include "pawsim/config.hpp"

namespace pawsim {

class BindError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Live teleop service: WebSocket endpoint plus the control loop on its own thread.
///
/// Every client may send cmd messages; the latest one to arrive wins. State messages go to
/// all clients at server.state_rate_hz. A client that breaks the protocol gets an err message
/// and is disconnected; other clients and the loop carry on.
class TeleopServer
{
public:
  /// `port` overrides config.server.port; 0 picks a free port.
  explicit TeleopServer(Config config, std::optional<int> port = std::nullopt);
  ~TeleopServer();

  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds and starts the network and loop threads. Throws BindError.
  void start();
  void stop();

  /// Bound port, valid after start().
  int port() const;
  std::uint64_t ticks() const;
  std::size_t session_count() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Starts a server and blocks until `stop` becomes true.
void serve(const Config& config, std::optional<int> port, const std::atomic<bool>& stop);

}  // namespace pawsim
