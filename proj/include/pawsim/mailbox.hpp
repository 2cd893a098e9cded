#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pawsim/controller.hpp"

namespace pawsim {

/// Latest-wins command slot between network sessions and the control loop. Posting never
/// blocks on the reader; reading does not consume.
class CommandMailbox
{
public:
  struct Entry
  {
    TeleopCommand command;
    std::uint64_t seq = 0;    ///< sequence number given by the poster
    std::uint64_t posts = 0;  ///< total posts so far
  };

  explicit CommandMailbox(TeleopCommand initial = {})
  {
    entry_.command = initial;
  }

  void post(const TeleopCommand& command, std::uint64_t seq)
  {
    std::lock_guard lock(mutex_);
    entry_.command = command;
    entry_.seq = seq;
    ++entry_.posts;
  }

  Entry snapshot() const
  {
    std::lock_guard lock(mutex_);
    return entry_;
  }

private:
  mutable std::mutex mutex_;
  Entry entry_;
};

/// Fan-out of values to bounded per-subscriber queues. publish() never waits for a
/// subscriber: a full queue drops its oldest value.
template <class T>
class Broadcast
{
public:
  class Subscription
  {
  public:
    explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

    std::optional<T> try_pop()
    {
      std::lock_guard lock(mutex_);
      if (queue_.empty()) return std::nullopt;
      T v = std::move(queue_.front());
      queue_.pop_front();
      return v;
    }

    std::size_t dropped() const
    {
      std::lock_guard lock(mutex_);
      return dropped_;
    }

    /// Called after every push, on the publishing thread. Must not block.
    void on_push(std::function<void()> notify)
    {
      std::lock_guard lock(mutex_);
      notify_ = std::move(notify);
    }

  private:
    friend class Broadcast;

    void push(const T& value)
    {
      std::function<void()> notify;
      {
        std::lock_guard lock(mutex_);
        if (queue_.size() >= capacity_) {
          queue_.pop_front();
          ++dropped_;
        }
        queue_.push_back(value);
        notify = notify_;
      }
      if (notify) notify();
    }

    mutable std::mutex mutex_;
    std::deque<T> queue_;
    std::size_t capacity_;
    std::size_t dropped_ = 0;
    std::function<void()> notify_;
  };

  std::shared_ptr<Subscription> subscribe(std::size_t capacity)
  {
    auto sub = std::make_shared<Subscription>(capacity == 0 ? 1 : capacity);
    std::lock_guard lock(mutex_);
    subscribers_.push_back(sub);
    return sub;
  }

  void publish(const T& value)
  {
    std::vector<std::shared_ptr<Subscription>> live;
    {
      std::lock_guard lock(mutex_);
      std::erase_if(subscribers_, [](const auto& w) { return w.expired(); });
      for (const auto& w : subscribers_) {
        if (auto s = w.lock()) live.push_back(std::move(s));
      }
    }
    for (const auto& s : live) s->push(value);
  }

  std::size_t subscriber_count()
  {
    std::lock_guard lock(mutex_);
    std::erase_if(subscribers_, [](const auto& w) { return w.expired(); });
    return subscribers_.size();
  }

private:
  std::mutex mutex_;
  std::vector<std::weak_ptr<Subscription>> subscribers_;
};

}  // namespace pawsim
