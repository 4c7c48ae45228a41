#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "teleop/actuator/messages.hpp"
#include "teleop/cli/app.hpp"
#include "teleop/cli/bridge.hpp"
#include "teleop/cli/config.hpp"
#include "teleop/cli/udp.hpp"
#include "teleop/core/error.hpp"
#include "teleop/perception/frame.hpp"

using namespace teleop;
using namespace teleop::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("teleop-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Bytes base64_decode(const std::string& s) {
  static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  Bytes out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : s) {
    if (c == '=') break;
    acc = (acc << 6) | std::uint32_t(alphabet.find(c));
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(std::uint8_t(acc >> bits));
    }
  }
  return out;
}

}  // namespace

TEST(Config, ParsesSectionsAndProfiles) {
  auto cfg = load_scenario_text(
      "route: japan\n"
      "transport: stream\n"
      "seed: 7\n"
      "n: 40\n"
      "noise:\n"
      "  center_sigma_px: 2.0\n"
      "overlay:\n"
      "  enabled: true\n"
      "  inference_ms: 150\n"
      "grasp:\n"
      "  tau_align_px: 6.4\n"
      "profiles:\n"
      "  - name: japan\n"
      "    base_owd_ms: 100\n");
  EXPECT_EQ(cfg.route, netem::Route::Japan);
  EXPECT_EQ(cfg.transport, session::TransportKind::OrderedStream);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.n, 40);
  EXPECT_EQ(cfg.room.noise.center_sigma_px, 2.0);
  EXPECT_TRUE(cfg.room.overlay.enabled);
  EXPECT_EQ(cfg.room.overlay.inference_ms, 150);
  EXPECT_DOUBLE_EQ(cfg.grasp.tau_align, 0.01);
  EXPECT_EQ(cfg.profiles.control(netem::Route::Japan).base_owd_ms, 100);
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    load_scenario_text("route: local\nnoise:\n  sigma: 3\n", "demo.yaml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
    EXPECT_NE(std::string(e.what()).find("demo.yaml:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_scenario_text("seed: banana\n"), Error);
  EXPECT_THROW(load_scenario_text("route: mars\n"), Error);
  EXPECT_THROW(load_scenario_file("/nonexistent/config.yaml"), Error);
}

TEST(Config, ProfileFileRelativeToConfig) {
  TempDir dir;
  dir.file("p.yaml", "profiles:\n  - name: local\n    base_owd_ms: 1\n");
  auto path = dir.file("c.yaml", "profile_file: p.yaml\n");
  auto cfg = load_scenario_file(path);
  EXPECT_EQ(cfg.profiles.control(netem::Route::Local).base_owd_ms, 1);
}

TEST(Cli, HelpOnEverySubcommand) {
  for (auto args : std::vector<std::vector<std::string>>{{"--help"},
                                                         {"perceive", "--help"},
                                                         {"serve", "--help"},
                                                         {"broker", "--help"},
                                                         {"arm", "--help"},
                                                         {"bench", "--help"},
                                                         {"bench", "table2", "--help"},
                                                         {"bench", "table3", "--help"},
                                                         {"bench", "grasp", "--help"}}) {
    auto r = run_cli(args);
    EXPECT_EQ(r.code, 0) << args.back() << r.err;
    EXPECT_NE((r.out + r.err).find("Usage"), std::string::npos);
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({"bench", "table2", "--route", "local", "--route", "japan"}).code, 2);
  EXPECT_EQ(run_cli({"bench", "table2", "--config", "/nonexistent.yaml"}).code, 2);
  EXPECT_EQ(run_cli({"bench", "table2", "--route", "mars"}).code, 2);
  EXPECT_EQ(run_cli({"bench", "table3", "--transport", "stream"}).code, 2);
  EXPECT_EQ(run_cli({"bench", "table2", "--n", "5"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
}

TEST(Cli, BadConfigReportsLineAndExitsTwo) {
  TempDir dir;
  auto path = dir.file("bad.yaml", "route: local\nbench:\n  hz: 3\n");
  auto r = run_cli({"bench", "table2", "--config", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.yaml:3"), std::string::npos) << r.err;
}

TEST(Cli, Table2LocalWritesReportAndPasses) {
  TempDir dir;
  auto out = (dir.path / "t2.csv").string();
  auto r = run_cli({"bench", "table2", "--route", "local", "--seed", "42", "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  auto csv = slurp(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4) << csv;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, ToleranceFailureExitsOne) {
  TempDir dir;
  auto path = dir.file("slow.yaml", "profiles:\n  - name: local\n    base_owd_ms: 400\n");
  auto r = run_cli({"bench", "table2", "--route", "local", "--n", "30", "--config", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir dir;
  auto cfg = dir.file("c.yaml", "seed: 1\nn: 30\nroute: japan\nformat: json\n");
  auto a = run_cli({"bench", "table2", "--config", cfg, "--seed", "2"});
  auto b = run_cli({"bench", "table2", "--route", "japan", "--n", "30", "--seed", "2", "--format", "json"});
  EXPECT_EQ(a.out, b.out);
  auto j = json::parse(a.out);
  EXPECT_EQ(j["seed"], 2);
  EXPECT_EQ(j["n"], 30);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
  TempDir dir;
  for (auto sub : {"table2", "table3", "grasp"}) {
    std::vector<std::string> base{"bench", sub, "--seed", "5", "--n", std::string(sub) == "table2" ? "30" : "200"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (dir.path / (std::string(sub) + "-a.json")).string()});
    b.insert(b.end(), {"--out", (dir.path / (std::string(sub) + "-b.json")).string()});
    auto ra = run_cli(a), rb = run_cli(b);
    EXPECT_EQ(ra.out, rb.out) << sub;
    EXPECT_EQ(slurp(a.back()), slurp(b.back())) << sub;
    EXPECT_FALSE(slurp(a.back()).empty());
  }
}

TEST(Cli, PerceiveWritesFramesAndMetrics) {
  TempDir dir;
  auto frames = (dir.path / "frames.bin").string();
  auto r = run_cli({"perceive", "--n", "50", "--seed", "3", "--frames-out", frames, "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 6), "class,");
  auto bin = slurp(frames);
  ByteReader reader(ByteView(reinterpret_cast<const std::uint8_t*>(bin.data()), bin.size()));
  int count = 0;
  while (!reader.done()) {
    const auto len = reader.u32();
    auto f = perception::decode_frame(reader.raw(len));
    EXPECT_EQ(f.frame_id, std::uint64_t(count + 1));
    ++count;
  }
  EXPECT_EQ(count, 50);
}

TEST(Bridge, Base64) {
  EXPECT_EQ(base64_encode(to_bytes("")), "");
  EXPECT_EQ(base64_encode(to_bytes("f")), "Zg==");
  EXPECT_EQ(base64_encode(to_bytes("fo")), "Zm8=");
  EXPECT_EQ(base64_encode(to_bytes("foobar")), "Zm9vYmFy");
}

TEST(Bridge, HttpRoundTrip) {
  EventLoop loop;
  session::RoomConfig room;
  room.overlay.enabled = true;
  session::SessionService svc(loop, netem::ProfileTable::defaults(), room, 1);
  Bridge bridge(svc);
  httplib::Server server;
  bridge.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client http("127.0.0.1", port);
  auto res = http.Post("/api", R"({"verb":"CREATE_ROOM","room_id":"lab","arm_id":"a1","route":"local"})",
                       "application/json");
  ASSERT_TRUE(res);
  EXPECT_TRUE(json::parse(res->body)["ok"].get<bool>());
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  res = http.Post("/api", R"({"verb":"JOIN","room_id":"lab","participant":"ui"})", "application/json");
  ASSERT_TRUE(res);
  bridge.pump(2'000'000);

  actuator::ControlMessage cmd{1, 0, actuator::Joint::J2, 45.0, 0};
  res = http.Post("/control?room=lab&participant=ui", actuator::encode_control(cmd), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;
  const auto seq = json::parse(res->body)["seq"].get<std::uint64_t>();
  bridge.pump(4'000'000);

  res = http.Get("/events?room=lab&participant=ui&since=0");
  ASSERT_TRUE(res);
  bool saw_ack = false, saw_frame = false;
  std::uint64_t last_i = 0;
  std::istringstream lines(res->body);
  for (std::string line; std::getline(lines, line);) {
    auto ev = json::parse(line);
    last_i = ev["i"].get<std::uint64_t>();
    if (ev["type"] == "ack") {
      auto ack = actuator::decode_ack(ev["payload"].get<std::string>());
      if (ack.seq == seq) saw_ack = ack.applied;
    } else if (ev["type"] == "frame") {
      auto f = perception::decode_frame(base64_decode(ev["frm1_b64"].get<std::string>()));
      EXPECT_EQ(f.frame_id, ev["frame_id"].get<std::uint64_t>());
      EXPECT_EQ(f.inference_ms, 200);
      saw_frame = true;
    }
  }
  EXPECT_TRUE(saw_ack);
  EXPECT_TRUE(saw_frame);
  res = http.Get(("/events?room=lab&participant=ui&since=" + std::to_string(last_i + 1)).c_str());
  ASSERT_TRUE(res);
  EXPECT_TRUE(res->body.empty());

  res = http.Get("/state?room=lab");
  ASSERT_TRUE(res);
  auto st = json::parse(res->body);
  EXPECT_EQ(st["room_id"], "lab");
  EXPECT_EQ(st["angles_deg"].size(), 6u);
  res = http.Get("/state?room=nope");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);

  res = http.Post("/control?room=lab&participant=ghost", actuator::encode_control(cmd), "application/json");
  ASSERT_TRUE(res);
  EXPECT_NE(res->status, 200);
  res = http.Post("/control?room=lab&participant=ui", "{broken", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = http.Get("/log?since=0");
  ASSERT_TRUE(res);
  EXPECT_NE(res->body.find("\"event\":\"create_room\""), std::string::npos);

  res = http.Options("/control");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  server.stop();
  th.join();
}

TEST(Udp, BrokerArmAndOperatorOnLoopback) {
  EXPECT_EQ(parse_endpoint("10.0.0.1:99").port, 99);
  EXPECT_THROW(parse_endpoint("nope"), Error);

  UdpBrokerServer broker(Endpoint{"127.0.0.1", 0});
  const Endpoint ep{"127.0.0.1", broker.port()};
  UdpArm arm(ep, "x");
  UdpPeer op(ep, "op");
  std::vector<actuator::AckMessage> acks;
  auto& client = op.client();
  client.connect();
  client.subscribe("arm/x/ack", msgbus::QoS::AtLeastOnce,
                   [&](const msgbus::Message& m) { acks.push_back(actuator::decode_ack(to_string(m.payload))); });
  op.loop().schedule_at(300'000, [&] {
    client.publish("arm/x/cmd", to_bytes(actuator::encode_control({1, 1, actuator::Joint::J4, 10.0, 0})),
                   msgbus::QoS::AtLeastOnce);
  });

  std::atomic<bool> stop{false};
  std::thread tb([&] { broker.run(stop, std::chrono::milliseconds(3000)); });
  std::thread ta([&] { arm.run(stop, std::chrono::milliseconds(3000)); });
  op.run(stop, std::chrono::milliseconds(1500));
  stop = true;
  ta.join();
  tb.join();

  ASSERT_FALSE(acks.empty());
  EXPECT_EQ(acks.front().seq, 1u);
  EXPECT_TRUE(acks.front().applied);
  EXPECT_EQ(arm.node().state().targets_deg[3], 10);
}
