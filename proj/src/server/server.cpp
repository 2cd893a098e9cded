#include "pawsim/server.hpp"

#include <chrono>
#include <deque>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pawsim/loop.hpp"
#include "pawsim/mailbox.hpp"
#include "pawsim/protocol.hpp"

namespace pawsim {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kOutboxLimit = 16;
constexpr std::size_t kMaxMessageBytes = 64 * 1024;

using StatePtr = std::shared_ptr<const StateMsg>;

}  // namespace

struct TeleopServer::Impl
{
  class Session;

  Impl(Config cfg, std::optional<int> port_override)
      : config(std::move(cfg)), requested_port(port_override.value_or(config.server.port)),
        loop(config)
  {
  }

  void accept();
  void run_loop();

  Config config;
  int requested_port;
  int bound_port = 0;
  ControlLoop loop;
  Broadcast<StatePtr> states;

  std::thread io_thread;
  std::thread loop_thread;
  std::atomic<bool> running{false};
  std::atomic<std::uint64_t> ticks{0};
  std::atomic<std::size_t> sessions{0};
  std::vector<std::weak_ptr<Session>> live;  // io thread only

  // Declared last so pending handlers, which own sessions, go first.
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
};

class TeleopServer::Impl::Session : public std::enable_shared_from_this<Session>
{
public:
  Session(Impl& server, tcp::socket socket) : server_(server), ws_(std::move(socket))
  {
    ++server_.sessions;
  }
  ~Session() { --server_.sessions; }

  void run()
  {
    ws_.read_message_max(kMaxMessageBytes);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void shutdown()
  {
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

private:
  void on_accept(beast::error_code ec)
  {
    if (ec) return;
    ws_.text(true);
    subscription_ = server_.states.subscribe(kOutboxLimit);
    std::weak_ptr<Session> weak = weak_from_this();
    net::io_context& ioc = server_.ioc;
    subscription_->on_push([weak, &ioc] {
      net::post(ioc, [weak] {
        if (auto self = weak.lock()) self->drain_states();
      });
    });
    read();
  }

  void read()
  {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec)
  {
    if (ec) {
      subscription_.reset();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    if (!closing_) read();
  }

  void handle(const std::string& text)
  {
    WireMessage msg;
    try {
      msg = decode(text, server_.config.gait_defaults);
    } catch (const ProtocolError& e) {
      fail(e.code(), e.what());
      return;
    }
    if (last_seq_ && msg.seq <= *last_seq_) {
      fail("sequence", "sequence numbers must increase");
      return;
    }
    last_seq_ = msg.seq;

    if (const auto* cmd = std::get_if<CmdMsg>(&msg.body)) {
      server_.loop.mailbox().post(server_.config.controller.limits.clamp(cmd->command), msg.seq);
    } else if (const auto* ping = std::get_if<PingMsg>(&msg.body)) {
      send(PongMsg{ping->client_time});
    } else if (std::holds_alternative<PongMsg>(msg.body)) {
      // Replies to nothing we sent; harmless.
    } else {
      fail("type", std::string("clients may not send ") + std::string(type_name(msg.body)));
    }
  }

  void fail(const std::string& code, const std::string& message)
  {
    subscription_.reset();
    outbox_.erase(outbox_.begin() + (writing_ ? 1 : 0), outbox_.end());
    send(ErrMsg{code, message});
    closing_ = true;
  }

  void drain_states()
  {
    if (!subscription_ || closing_) return;
    while (auto state = subscription_->try_pop()) send(**state);
  }

  void send(MessageBody body)
  {
    outbox_.push_back(encode(WireMessage{++seq_, std::move(body)}));
    // Slow reader: drop the oldest queued message that is not already being written.
    if (outbox_.size() > kOutboxLimit) outbox_.erase(outbox_.begin() + (writing_ ? 1 : 0));
    write_next();
  }

  void write_next()
  {
    if (writing_) return;
    if (outbox_.empty()) {
      if (closing_ && !closed_) {
        closed_ = true;
        ws_.async_close(websocket::close_code::policy_error,
                        [self = shared_from_this()](beast::error_code) {});
      }
      return;
    }
    writing_ = true;
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) {
                        self->outbox_.clear();
                        self->subscription_.reset();
                        return;
                      }
                      self->outbox_.pop_front();
                      self->write_next();
                    });
  }

  Impl& server_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<Broadcast<StatePtr>::Subscription> subscription_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closing_ = false;
  bool closed_ = false;
  std::uint64_t seq_ = 0;
  std::optional<std::uint64_t> last_seq_;
};

void TeleopServer::Impl::accept()
{
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto session = std::make_shared<Session>(*this, std::move(socket));
    std::erase_if(live, [](const auto& w) { return w.expired(); });
    live.push_back(session);
    session->run();
    accept();
  });
}

void TeleopServer::Impl::run_loop()
{
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(config.control_dt()));
  const auto every = static_cast<std::uint64_t>(
      std::max(1L, std::lround(config.controller.rate_hz / config.server.state_rate_hz)));

  auto next = clock::now();
  while (running.load()) {
    const TickSample& sample = loop.step();
    ticks.store(loop.ticks());
    if (loop.ticks() % every == 0) {
      states.publish(std::make_shared<const StateMsg>(make_state_message(sample)));
    }
    next += period;
    const auto now = clock::now();
    if (next < now - 10 * period) next = now;  // fell far behind: do not burst to catch up
    std::this_thread::sleep_until(next);
  }
}

TeleopServer::TeleopServer(Config config, std::optional<int> port)
    : impl_(std::make_unique<Impl>(std::move(config), port))
{
}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start()
{
  Impl& s = *impl_;
  if (s.running.load()) return;
  beast::error_code ec;
  const tcp::endpoint endpoint{net::ip::address_v4::any(),
                               static_cast<unsigned short>(s.requested_port)};
  s.acceptor.open(endpoint.protocol(), ec);
  if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor.bind(endpoint, ec);
  if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    beast::error_code ignored;
    s.acceptor.close(ignored);
    throw BindError("cannot listen on port " + std::to_string(s.requested_port) + ": " +
                    ec.message());
  }
  s.bound_port = s.acceptor.local_endpoint().port();

  s.running = true;
  s.accept();
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.loop_thread = std::thread([&s] { s.run_loop(); });
}

void TeleopServer::stop()
{
  Impl& s = *impl_;
  if (!s.running.exchange(false)) return;
  if (s.loop_thread.joinable()) s.loop_thread.join();
  net::post(s.ioc, [&s] {
    beast::error_code ignored;
    s.acceptor.close(ignored);
    for (const auto& w : s.live) {
      if (auto session = w.lock()) session->shutdown();
    }
  });
  // Let the closes run, then drop whatever is still pending.
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  s.ioc.stop();
  if (s.io_thread.joinable()) s.io_thread.join();
}

int TeleopServer::port() const { return impl_->bound_port; }

std::uint64_t TeleopServer::ticks() const { return impl_->ticks.load(); }

std::size_t TeleopServer::session_count() const { return impl_->sessions.load(); }

void serve(const Config& config, std::optional<int> port, const std::atomic<bool>& stop)
{
  TeleopServer server(config, port);
  server.start();
  while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
}

}  // namespace pawsim
