#pragma once

#include <map>
#include <string>
#include <vector>

#include "teleop/actuator/grasp.hpp"
#include "teleop/bench/stats.hpp"
#include "teleop/perception/metrics.hpp"
#include "teleop/session/room.hpp"

namespace teleop::bench {

using perception::Execution;

struct ScenarioOptions {
  netem::ProfileTable profiles = netem::ProfileTable::defaults();
  session::RoomConfig room{};
  double command_hz = 2.0;
  double video_fps = 10.0;
  /// How long to wait for stragglers after the last send.
  Micros drain = 30'000'000;
  Micros setup_timeout = 60'000'000;
  /// Pace the simulation against the wall clock (demos); virtual time otherwise.
  bool realtime = false;
};

struct RunResult {
  LatencyStats stats;
  std::vector<LatencySample> samples;
  std::uint64_t sent = 0;
  std::uint64_t lost = 0;
  /// Connection setup before the first measured send.
  double setup_ms = 0;
};

/// n joint commands at command_hz from one operator; latency = ack receipt - issue.
/// Throws Error{invalid_argument} for n < 30 and Error{scenario} when more
/// than half the commands are never acknowledged.
RunResult run_control_latency(netem::Route route, session::TransportKind transport, int n, std::uint64_t seed,
                              const ScenarioOptions& opts = {});

/// n frames at video_fps; latency = display (receipt + render) - capture.
RunResult run_video_latency(netem::Route route, bool overlay, int n, std::uint64_t seed,
                            const ScenarioOptions& opts = {});

struct TransportResult {
  session::TransportKind transport;
  RunResult run;
};

struct ComparisonReport {
  netem::Route route = netem::Route::Local;
  std::vector<TransportResult> results;  // PubSub, then OrderedStream

  const TransportResult& pubsub() const { return results.at(0); }
  const TransportResult& stream() const { return results.at(1); }
};

/// Same command schedule and seed over both control transports.
ComparisonReport compare_transports(netem::Route route, int n, std::uint64_t seed, const ScenarioOptions& opts = {},
                                    Execution exec = Execution::Parallel);

struct ClassOutcome {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

struct CampaignReport {
  netem::Route route = netem::Route::Japan;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::vector<ClassOutcome> per_class;
  std::map<std::string, std::uint64_t> failure_reasons;

  double success_rate() const {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  }
};

/// Each trial places one object (classes round-robin), captures an overlay
/// frame, aims the arm at the detection, waits for convergence, then scores
/// grasp_attempt. Throws Error{invalid_argument} for n_trials < 30.
CampaignReport run_grasp_campaign(netem::Route route, int n_trials, std::uint64_t seed,
                                  const ScenarioOptions& opts = {}, const actuator::GraspParams& params = {});

}  // namespace teleop::bench
