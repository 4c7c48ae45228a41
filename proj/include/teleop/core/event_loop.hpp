#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "teleop/core/time.hpp"

namespace teleop {

using TimerId = std::uint64_t;

/// Single-threaded discrete-event loop over virtual microseconds.
///
/// Events at equal timestamps run in scheduling order, so a run is a pure
/// function of the sequence of schedule calls.
class EventLoop {
 public:
  using Task = std::function<void()>;

  Micros now() const { return now_; }

  TimerId schedule_at(Micros at, Task task);
  TimerId schedule_after(Micros delay, Task task) { return schedule_at(now_ + delay, std::move(task)); }
  void cancel(TimerId id);

  /// Runs the earliest pending event. Returns false when idle.
  bool run_one();
  /// Runs until no events remain.
  void run();
  /// Runs every event with time <= deadline, then sets now() to deadline.
  void run_until(Micros deadline);
  /// Runs until pred() holds or the loop is idle or deadline passes. Returns pred().
  bool run_until(const std::function<bool()>& pred, Micros deadline);

  /// Moves the clock forward without running anything (for externally paced loops).
  void advance_to(Micros t);

  std::optional<Micros> next_time();
  std::size_t pending() const { return live_.size(); }

  /// Called with each event's timestamp just before it runs; a pacer that
  /// sleeps turns virtual time into wall-clock time.
  void set_pacer(std::function<void(Micros)> pacer) { pacer_ = std::move(pacer); }

 private:
  struct Entry {
    Micros at;
    std::uint64_t order;
    TimerId id;
    // mutable so the task can be moved out of the priority_queue top.
    mutable Task task;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.at != b.at ? a.at > b.at : a.order > b.order;
    }
  };

  void drop_dead_head();

  Micros now_ = 0;
  std::uint64_t next_order_ = 0;
  TimerId next_id_ = 1;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<TimerId> live_;
  std::function<void(Micros)> pacer_;
};

/// Pacer that sleeps until `at` microseconds have passed on the steady clock
/// since the pacer was made.
std::function<void(Micros)> wall_clock_pacer();

}  // namespace teleop
