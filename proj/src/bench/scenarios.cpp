#include "teleop/bench/scenarios.hpp"

#include <algorithm>
#include <map>
#include <spdlog/spdlog.h>

#include "teleop/session/service.hpp"

namespace teleop::bench {

using actuator::ControlMessage;
using actuator::Joint;
using session::Room;
using session::TransportKind;

namespace {

constexpr const char* kRoom = "bench";
constexpr const char* kArm = "arm0";
constexpr const char* kOperator = "op";

void check_n(int n) {
  if (n < 30) throw Error(Errc::invalid_argument, "need at least 30 samples, got " + std::to_string(n));
}

/// Joins one operator and runs the loop until every connection is up.
double setup(EventLoop& loop, Room& room, Micros timeout) {
  room.join(kOperator);
  const Micros start = loop.now();
  if (!loop.run_until([&] { return room.ready(kOperator) && room.arm_ready(); }, start + timeout)) {
    throw Error(Errc::scenario, "room setup did not complete");
  }
  return us_to_ms(loop.now() - start);
}

RunResult finish(std::vector<LatencySample> samples, std::uint64_t sent, double setup_ms) {
  RunResult r;
  r.sent = sent;
  r.lost = sent - samples.size();
  r.setup_ms = setup_ms;
  if (r.lost * 2 > sent) {
    throw Error(Errc::scenario, std::to_string(r.lost) + " of " + std::to_string(sent) + " samples lost");
  }
  std::vector<double> ms;
  ms.reserve(samples.size());
  for (const auto& s : samples) ms.push_back(s.latency_ms());
  r.stats = summarize(std::move(ms));
  r.samples = std::move(samples);
  return r;
}

}  // namespace

RunResult run_control_latency(netem::Route route, TransportKind transport, int n, std::uint64_t seed,
                              const ScenarioOptions& opts) {
  check_n(n);
  EventLoop loop;
  if (opts.realtime) loop.set_pacer(wall_clock_pacer());
  session::RoomConfig cfg = opts.room;
  cfg.transport = transport;
  session::SessionService svc(loop, opts.profiles, cfg, seed);
  Room& room = svc.create_room(kRoom, kArm, route);
  const double setup_ms = setup(loop, room, opts.setup_timeout);

  std::map<std::uint64_t, Micros> sent;
  std::map<std::uint64_t, Micros> acked;
  room.on_ack(kOperator, [&](const actuator::AckMessage& ack, Micros at) {
    // First ack wins; redelivered duplicates come back applied=false.
    if (sent.count(ack.seq) && !acked.count(ack.seq)) acked[ack.seq] = at;
  });

  const Micros start = loop.now();
  const Micros period = ms_to_us(1000.0 / opts.command_hz);
  for (int i = 0; i < n; ++i) {
    loop.schedule_at(start + i * period, [&, i] {
      ControlMessage msg;
      msg.joint = static_cast<Joint>(i % 6);
      msg.target_deg = 30.0 + (i * 37) % 120;
      const auto receipt = room.route_control(kOperator, msg);
      sent[receipt.seq] = receipt.sent_at;
    });
  }
  const Micros last = start + (n - 1) * period;
  loop.run_until([&] { return loop.now() >= last && acked.size() == static_cast<std::size_t>(n); },
                 last + opts.drain);

  std::vector<LatencySample> samples;
  for (const auto& [seq, at] : acked) {
    samples.push_back(LatencySample{LatencyKind::Control, sent.at(seq), at, route, transport});
  }
  return finish(std::move(samples), static_cast<std::uint64_t>(n), setup_ms);
}

RunResult run_video_latency(netem::Route route, bool overlay, int n, std::uint64_t seed,
                            const ScenarioOptions& opts) {
  check_n(n);
  EventLoop loop;
  if (opts.realtime) loop.set_pacer(wall_clock_pacer());
  session::RoomConfig cfg = opts.room;
  cfg.overlay.enabled = overlay;
  session::SessionService svc(loop, opts.profiles, cfg, seed);
  Room& room = svc.create_room(kRoom, kArm, route);
  const double setup_ms = setup(loop, room, opts.setup_timeout);

  const auto kind = overlay ? LatencyKind::VideoOverlay : LatencyKind::Video;
  std::map<std::uint64_t, LatencySample> shown;
  room.on_frame(kOperator, [&](const perception::DetectionFrame& f, Micros at) {
    shown.emplace(f.frame_id, LatencySample{kind, f.captured_at, at, route, cfg.transport});
  });

  const Micros start = loop.now();
  room.start_camera(opts.video_fps, static_cast<std::uint64_t>(n));
  const Micros last = start + ms_to_us(1000.0 / opts.video_fps) * (n - 1);
  loop.run_until([&] { return shown.size() == static_cast<std::size_t>(n); }, last + opts.drain);

  std::vector<LatencySample> samples;
  for (auto& [id, s] : shown) samples.push_back(s);
  return finish(std::move(samples), static_cast<std::uint64_t>(n), setup_ms);
}

ComparisonReport compare_transports(netem::Route route, int n, std::uint64_t seed, const ScenarioOptions& opts,
                                    Execution exec) {
  check_n(n);
  const TransportKind kinds[2] = {TransportKind::PubSub, TransportKind::OrderedStream};
  RunResult runs[2];
  std::exception_ptr failure[2];
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (int i = 0; i < 2; ++i) {
    try {
      runs[i] = run_control_latency(route, kinds[i], n, seed, opts);
    } catch (...) {
      failure[i] = std::current_exception();
    }
  }
  for (auto& f : failure) {
    if (f) std::rethrow_exception(f);
  }
  ComparisonReport report;
  report.route = route;
  for (int i = 0; i < 2; ++i) report.results.push_back(TransportResult{kinds[i], std::move(runs[i])});
  return report;
}

CampaignReport run_grasp_campaign(netem::Route route, int n_trials, std::uint64_t seed, const ScenarioOptions& opts,
                                  const actuator::GraspParams& params) {
  check_n(n_trials);
  EventLoop loop;
  if (opts.realtime) loop.set_pacer(wall_clock_pacer());
  session::RoomConfig cfg = opts.room;
  cfg.overlay.enabled = true;
  session::SessionService svc(loop, opts.profiles, cfg, seed);
  Room& room = svc.create_room(kRoom, kArm, route);
  setup(loop, room, opts.setup_timeout);

  Rng placement = make_rng(seed, "grasp/placement");
  std::uniform_real_distribution<double> center(0.15, 0.85);
  std::uniform_real_distribution<double> size(0.08, 0.25);

  perception::SceneObject target;
  room.set_scene_source([&](std::uint64_t) { return std::vector<perception::SceneObject>{target}; });

  std::optional<perception::DetectionFrame> frame;
  room.on_frame(kOperator, [&](const perception::DetectionFrame& f, Micros) { frame = f; });
  std::map<std::uint64_t, bool> awaiting;
  room.on_ack(kOperator, [&](const actuator::AckMessage& ack, Micros) { awaiting.erase(ack.seq); });

  auto command = [&](Joint j, double deg) {
    ControlMessage msg;
    msg.joint = j;
    msg.target_deg = std::clamp(deg, 0.0, 180.0);
    awaiting[room.route_control(kOperator, msg).seq] = true;
  };
  auto settle = [&] {
    loop.run_until([&] { return awaiting.empty() && room.arm().converged(params.converge_tol_deg); },
                   loop.now() + opts.drain);
  };

  const auto& classes = cfg.classes;
  CampaignReport report;
  report.route = route;
  for (std::size_t c = 0; c < classes.size(); ++c) report.per_class.push_back(ClassOutcome{classes.name(c)});

  for (int t = 0; t < n_trials; ++t) {
    const auto cls = static_cast<perception::ClassId>(static_cast<std::size_t>(t) % classes.size());
    target.class_id = cls;
    target.box.cx = center(placement);
    target.box.cy = center(placement);
    target.box.w = size(placement);
    target.box.h = size(placement);

    if (room.arm().state().gripper_closed) {
      command(Joint::Grip, 0);
      settle();
    }

    frame.reset();
    const std::uint64_t id = room.capture_frame();
    loop.run_until([&] { return frame && frame->frame_id == id; }, loop.now() + opts.drain);

    std::optional<perception::Detection> det;
    if (frame) {
      for (const auto& d : frame->detections) {
        if (d.class_id == cls && (!det || d.confidence > det->confidence)) det = d;
      }
    }
    if (det) {
      // Aim: base yaw across the image, shoulder down the image.
      command(Joint::J1, 180.0 * det->box.cx);
      command(Joint::J2, 40.0 + 100.0 * det->box.cy);
      settle();
    }

    const auto outcome = actuator::grasp_attempt(room.arm().state(), target, det, params,
                                                 room.arm().oldest_pending_issued_at(), loop.now());
    auto& row = report.per_class[cls];
    ++row.trials;
    ++report.trials;
    if (outcome.success) {
      ++row.successes;
      ++report.successes;
      command(Joint::Grip, 180);
      settle();
    } else {
      ++report.failure_reasons[outcome.reason];
    }
  }
  spdlog::debug("grasp campaign: {}/{} in {:.1f} s virtual", report.successes, report.trials,
                us_to_ms(loop.now()) / 1000.0);
  return report;
}

}  // namespace teleop::bench
