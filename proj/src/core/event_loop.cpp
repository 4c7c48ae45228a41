#include "teleop/core/event_loop.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

namespace teleop {

TimerId EventLoop::schedule_at(Micros at, Task task) {
  if (at < now_) at = now_;
  const TimerId id = next_id_++;
  queue_.push(Entry{at, next_order_++, id, std::move(task)});
  live_.insert(id);
  return id;
}

void EventLoop::cancel(TimerId id) { live_.erase(id); }

void EventLoop::drop_dead_head() {
  while (!queue_.empty() && !live_.contains(queue_.top().id)) queue_.pop();
}

std::optional<Micros> EventLoop::next_time() {
  drop_dead_head();
  if (queue_.empty()) return std::nullopt;
  return queue_.top().at;
}

bool EventLoop::run_one() {
  drop_dead_head();
  if (queue_.empty()) return false;
  Task task = std::move(queue_.top().task);
  const Micros at = queue_.top().at;
  live_.erase(queue_.top().id);
  queue_.pop();
  if (pacer_) pacer_(at);
  now_ = at;
  task();
  return true;
}

void EventLoop::run() {
  while (run_one()) {
  }
}

void EventLoop::run_until(Micros deadline) {
  while (true) {
    auto next = next_time();
    if (!next || *next > deadline) break;
    run_one();
  }
  if (deadline > now_) now_ = deadline;
}

bool EventLoop::run_until(const std::function<bool()>& pred, Micros deadline) {
  while (!pred()) {
    auto next = next_time();
    if (!next || *next > deadline) return pred();
    run_one();
  }
  return true;
}

void EventLoop::advance_to(Micros t) {
  if (t < now_) throw std::logic_error("EventLoop::advance_to moves backwards");
  now_ = t;
}

std::function<void(Micros)> wall_clock_pacer() {
  const auto start = std::chrono::steady_clock::now();
  return [start](Micros at) { std::this_thread::sleep_until(start + std::chrono::microseconds(at)); };
}

}  // namespace teleop
