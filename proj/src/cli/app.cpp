#include "teleop/cli/app.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <httplib.h>
#include <iostream>
#include <list>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <thread>

#include "teleop/bench/reports.hpp"
#include "teleop/cli/bridge.hpp"
#include "teleop/cli/config.hpp"
#include "teleop/cli/udp.hpp"
#include "teleop/netem/profile_file.hpp"
#include "teleop/perception/detector.hpp"
#include "teleop/perception/frame.hpp"
#include "teleop/perception/metrics.hpp"

namespace teleop::cli {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct Flags {
  std::string config;
  std::string route;
  std::string transport;
  std::uint64_t seed = 0;
  int n = 0;
  std::string out;
  std::string profile_file;
  bool realtime = false;
  std::string format = "text";
  int qos = 1;

  CLI::Option* route_opt = nullptr;
  CLI::Option* transport_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* qos_opt = nullptr;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "Scenario config file (YAML)");
  f.route_opt = app->add_option("--route", f.route, "Route: local, hongkong, japan, belgium");
  f.transport_opt = app->add_option("--transport", f.transport, "Control transport: pubsub or stream");
  f.seed_opt = app->add_option("--seed", f.seed, "Base RNG seed");
  f.n_opt = app->add_option("--n", f.n, "Sample / trial / frame count");
  f.out_opt = app->add_option("--out", f.out, "Report file; format from extension (.csv, .json, .txt)");
  app->add_option("--profile-file", f.profile_file, "Network profile overrides (YAML)");
  app->add_flag("--realtime", f.realtime, "Pace against the wall clock instead of virtual time");
  f.format_opt = app->add_option("--format", f.format, "Stdout format: text, csv, json");
}

ScenarioConfig resolve(const Flags& f) {
  ScenarioConfig cfg;
  if (!f.config.empty()) cfg = load_scenario_file(f.config);
  if (!f.profile_file.empty()) netem::load_profile_file(f.profile_file, cfg.profiles);
  if (f.route_opt && f.route_opt->count()) cfg.route = netem::parse_route(f.route);
  if (f.transport_opt && f.transport_opt->count()) cfg.transport = session::parse_transport(f.transport);
  if (f.seed_opt && f.seed_opt->count()) cfg.seed = f.seed;
  if (f.n_opt && f.n_opt->count()) cfg.n = f.n;
  if (f.out_opt && f.out_opt->count()) cfg.out = f.out;
  if (f.format_opt && f.format_opt->count()) cfg.format = f.format;
  if (f.qos_opt && f.qos_opt->count()) cfg.qos = f.qos;
  if (f.realtime) cfg.realtime = true;
  if (cfg.n && *cfg.n <= 0) throw Error(Errc::config, "--n must be positive");
  return cfg;
}

bench::ScenarioOptions scenario_options(const ScenarioConfig& cfg) {
  bench::ScenarioOptions o;
  o.profiles = cfg.profiles;
  o.room = cfg.room;
  if (cfg.transport) o.room.transport = *cfg.transport;
  if (cfg.qos) o.room.control_qos = static_cast<msgbus::QoS>(*cfg.qos);
  o.command_hz = cfg.command_hz;
  o.video_fps = cfg.video_fps;
  o.realtime = cfg.realtime;
  return o;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::config, path + ": cannot write");
  f << content;
}

/// Writes the report to --out (format by extension) and stdout (--format).
template <typename Report>
void emit(const Report& r, const ScenarioConfig& cfg, std::ostream& out) {
  const auto stdout_format = bench::parse_format(cfg.format.value_or("text"));
  if (cfg.out) write_file(*cfg.out, bench::render(r, bench::format_for_path(*cfg.out)));
  out << bench::render(r, stdout_format);
}

int bench_table2(const Flags& f, std::ostream& out) {
  const auto cfg = resolve(f);
  bench::Table2Config t;
  if (cfg.route) t.routes = {*cfg.route};
  t.n = cfg.n.value_or(100);
  t.seed = cfg.seed.value_or(42);
  t.opts = scenario_options(cfg);
  t.transport = t.opts.room.transport;
  t.tolerance = cfg.tolerance;
  const auto report = bench::run_table2(t);
  emit(report, cfg, out);
  return report.passed() ? 0 : 1;
}

int bench_table3(const Flags& f, std::ostream& out) {
  if (f.transport_opt->count()) throw Error(Errc::config, "bench table3 runs both transports; drop --transport");
  const auto cfg = resolve(f);
  bench::Table3Config t;
  t.route = cfg.route.value_or(netem::Route::Local);
  t.n = cfg.n.value_or(1000);
  t.seed = cfg.seed.value_or(42);
  t.opts = scenario_options(cfg);
  const netem::NetProfile* constrained = cfg.profiles.find("constrained");
  t.opts.profiles.set_control(t.route, constrained ? *constrained : netem::constrained_profile());
  t.opts.room.control_qos = static_cast<msgbus::QoS>(cfg.qos.value_or(0));
  const auto report = bench::run_table3(t);
  emit(report, cfg, out);
  return report.passed() ? 0 : 1;
}

int bench_grasp(const Flags& f, std::ostream& out) {
  const auto cfg = resolve(f);
  bench::GraspConfig g;
  g.route = cfg.route.value_or(netem::Route::Japan);
  g.n = cfg.n.value_or(300);
  g.seed = cfg.seed.value_or(42);
  g.opts = scenario_options(cfg);
  g.params = cfg.grasp;
  const auto report = bench::run_grasp(g);
  emit(report, cfg, out);
  return report.passed() ? 0 : 1;
}

std::string metrics_json(const perception::DetectionMetrics& m, std::uint64_t seed, int frames) {
  using json = nlohmann::ordered_json;
  auto row = [](const perception::ClassMetrics& c) {
    json j;
    j["class"] = c.name;
    j["images"] = c.images;
    j["instances"] = c.instances;
    j["box_p"] = c.box_p ? json(*c.box_p) : json(nullptr);
    j["r"] = c.r;
    j["map50"] = c.map50 ? json(*c.map50) : json(nullptr);
    j["map50_95"] = c.map50_95 ? json(*c.map50_95) : json(nullptr);
    return j;
  };
  json j;
  j["report"] = "perceive";
  j["seed"] = seed;
  j["frames"] = frames;
  j["all"] = row(m.all);
  j["per_class"] = json::array();
  for (const auto& c : m.per_class) j["per_class"].push_back(row(c));
  return j.dump(2) + "\n";
}

int perceive(const Flags& f, const std::string& frames_out, std::ostream& out) {
  const auto cfg = resolve(f);
  const int frames = cfg.n.value_or(1000);
  const std::uint64_t seed = cfg.seed.value_or(42);
  const auto& classes = cfg.room.classes;
  Rng scene_rng = make_rng(seed, "perceive/scene");
  Rng detect_rng = make_rng(seed, "perceive/detect");

  std::vector<perception::GroundTruth> gts;
  std::vector<perception::Prediction> preds;
  Bytes stream;
  perception::OverlayConfig overlay = cfg.room.overlay;
  overlay.enabled = true;
  for (int i = 0; i < frames; ++i) {
    perception::DetectionFrame frame;
    frame.frame_id = static_cast<std::uint64_t>(i + 1);
    frame.captured_at = ms_to_us(1000.0 / cfg.camera_fps) * i;
    frame.scene = perception::random_scene(scene_rng, classes, cfg.room.max_objects);
    const auto dets = perception::detect(frame.scene, cfg.room.noise, detect_rng, classes);
    for (const auto& o : frame.scene) gts.push_back({frame.frame_id, o.class_id, o.box});
    for (const auto& d : dets) preds.push_back({frame.frame_id, d});
    if (!frames_out.empty()) {
      const Bytes wire = perception::encode_frame(perception::annotate(frame, dets, overlay));
      ByteWriter w;
      w.u32(static_cast<std::uint32_t>(wire.size()));
      w.raw(wire);
      const Bytes framed = w.take();
      stream.insert(stream.end(), framed.begin(), framed.end());
    }
  }
  const auto metrics = perception::map_metric(preds, gts, classes);
  if (!frames_out.empty()) write_file(frames_out, std::string(stream.begin(), stream.end()));

  auto render = [&](bench::Format fmt) {
    switch (fmt) {
      case bench::Format::Csv: return perception::metrics_csv(metrics);
      case bench::Format::Json: return metrics_json(metrics, seed, frames);
      case bench::Format::Text: break;
    }
    return perception::metrics_table(metrics);
  };
  if (cfg.out) write_file(*cfg.out, render(bench::format_for_path(*cfg.out)));
  out << render(bench::parse_format(cfg.format.value_or("text")));
  return 0;
}

int serve(const Flags& f, const std::string& host_flag, int port_flag, double duration_s, std::ostream& out) {
  auto cfg = resolve(f);
  if (!host_flag.empty()) cfg.serve_host = host_flag;
  if (port_flag >= 0) cfg.serve_port = port_flag;

  EventLoop loop;
  session::RoomConfig room_cfg = cfg.room;
  if (cfg.transport) room_cfg.transport = *cfg.transport;
  if (cfg.qos) room_cfg.control_qos = static_cast<msgbus::QoS>(*cfg.qos);
  session::SessionService service(loop, cfg.profiles, room_cfg, cfg.seed.value_or(42));
  Bridge bridge(service, BridgeOptions{cfg.camera_fps});
  if (cfg.serve_room) {
    nlohmann::ordered_json req;
    req["verb"] = "CREATE_ROOM";
    req["room_id"] = *cfg.serve_room;
    req["arm_id"] = cfg.serve_arm_id;
    req["route"] = netem::to_string(cfg.route.value_or(netem::Route::Local));
    const auto reply = nlohmann::json::parse(bridge.api(req.dump()));
    if (!reply.value("ok", false)) throw Error(Errc::config, reply.value("message", "cannot create room"));
  }

  httplib::Server server;
  bridge.mount(server);
  if (!server.bind_to_port(cfg.serve_host, cfg.serve_port)) {
    throw Error(Errc::config, "cannot listen on " + cfg.serve_host + ":" + std::to_string(cfg.serve_port));
  }
  out << "serving on http://" << cfg.serve_host << ":" << cfg.serve_port << std::endl;

  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread http([&] { server.listen_after_bind(); });
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (duration_s > 0 && elapsed >= std::chrono::duration<double>(duration_s)) break;
    bridge.pump(std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count());
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  server.stop();
  http.join();
  return 0;
}

int broker(const std::string& host, int port, double duration_s, std::ostream& out) {
  UdpBrokerServer server(Endpoint{host, static_cast<std::uint16_t>(port)});
  out << "broker listening on udp " << host << ":" << server.port() << std::endl;
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.run(g_stop, std::chrono::milliseconds(static_cast<long>(duration_s * 1000)));
  return 0;
}

int arm(const Flags& f, const std::string& broker_addr, const std::string& arm_id, double duration_s,
        std::ostream& out) {
  auto cfg = resolve(f);
  const Endpoint ep = parse_endpoint(broker_addr.empty() ? cfg.udp_broker : broker_addr);
  const std::string id = arm_id.empty() ? cfg.udp_arm_id : arm_id;
  UdpArm node(ep, id, cfg.room.arm, static_cast<msgbus::QoS>(cfg.qos.value_or(1)));
  out << "arm " << id << " attached to udp " << ep.host << ":" << ep.port << std::endl;
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  node.run(g_stop, std::chrono::milliseconds(static_cast<long>(duration_s * 1000)));
  return 0;
}

int classify(const Error& e) {
  switch (e.code()) {
    case Errc::config:
    case Errc::invalid_argument: return 2;
    default: return 1;
  }
}

}  // namespace

void init_logging() {
  static bool done = false;
  if (!done) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("teleop"));
    done = true;
  }
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("TELEOP_LOG")) {
    const auto level = spdlog::level::from_str(lvl);
    if (level == spdlog::level::off && std::string(lvl) != "off") {
      spdlog::warn("TELEOP_LOG: unknown level '{}'", lvl);
    } else {
      spdlog::set_level(level);
    }
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Teleoperation stack: broker, arm, perception, session service, and benchmarks", "teleop"};
  app.require_subcommand(1);

  // One Flags per subcommand: each holds pointers to its own options.
  std::list<Flags> flags;
  std::string frames_out, host, broker_addr, arm_id;
  int port = -1;
  double duration = 0;
  std::function<int()> action;

  auto* perceive_cmd = app.add_subcommand("perceive", "Simulated detector run with a detection-metrics report");
  Flags& fp = flags.emplace_back();
  add_common(perceive_cmd, fp);
  perceive_cmd->add_option("--frames-out", frames_out, "Write FRM1 frames (u32 length-prefixed) to this file");
  perceive_cmd->callback([&] { action = [&] { return perceive(fp, frames_out, out); }; });

  auto* serve_cmd = app.add_subcommand("serve", "Session service with the HTTP bridge for browser clients");
  Flags& fs = flags.emplace_back();
  add_common(serve_cmd, fs);
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--port", port, "Listen port");
  serve_cmd->add_option("--duration", duration, "Stop after this many seconds (0 = until signalled)");
  serve_cmd->callback([&] { action = [&] { return serve(fs, host, port, duration, out); }; });

  auto* broker_cmd = app.add_subcommand("broker", "Pub/sub broker on a UDP port");
  broker_cmd->add_option("--host", host, "Bind address")->default_val("127.0.0.1");
  broker_cmd->add_option("--port", port, "Bind port")->default_val(1883);
  broker_cmd->add_option("--duration", duration, "Stop after this many seconds (0 = until signalled)");
  broker_cmd->callback([&] { action = [&] { return broker(host, port, duration, out); }; });

  auto* arm_cmd = app.add_subcommand("arm", "Simulated arm attached to a UDP broker");
  Flags& fa = flags.emplace_back();
  add_common(arm_cmd, fa);
  arm_cmd->add_option("--broker", broker_addr, "Broker host:port");
  arm_cmd->add_option("--arm-id", arm_id, "Arm id (topics arm/<id>/cmd and arm/<id>/ack)");
  arm_cmd->add_option("--duration", duration, "Stop after this many seconds (0 = until signalled)");
  arm_cmd->callback([&] { action = [&] { return arm(fa, broker_addr, arm_id, duration, out); }; });

  auto* bench_cmd = app.add_subcommand("bench", "Latency, transport, and grasp benchmarks");
  bench_cmd->require_subcommand(1);
  auto* t2 = bench_cmd->add_subcommand("table2", "Per-route control and video latency");
  Flags& f2 = flags.emplace_back();
  add_common(t2, f2);
  t2->callback([&] { action = [&] { return bench_table2(f2, out); }; });
  auto* t3 = bench_cmd->add_subcommand("table3", "PubSub vs OrderedStream control latency and jitter");
  Flags& f3 = flags.emplace_back();
  add_common(t3, f3);
  f3.qos_opt = t3->add_option("--qos", f3.qos, "Control QoS for the pub/sub run (default 0)")->check(CLI::Range(0, 1));
  t3->callback([&] { action = [&] { return bench_table3(f3, out); }; });
  auto* grasp = bench_cmd->add_subcommand("grasp", "Grasp campaign over the video and control planes");
  Flags& fg = flags.emplace_back();
  add_common(grasp, fg);
  grasp->callback([&] { action = [&] { return bench_grasp(fg, out); }; });

  std::vector<const char*> argv{"teleop"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  init_logging();
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace teleop::cli
