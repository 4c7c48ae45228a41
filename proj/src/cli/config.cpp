#include "teleop/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <yaml-cpp/yaml.h>

#include "netem/profile_yaml.hpp"
#include "teleop/netem/profile_file.hpp"

namespace teleop::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    throw Error(Errc::config, origin_ + ":" + std::to_string(node.Mark().line + 1) + ": " + msg);
  }

  template <typename T>
  T get(const YAML::Node& node, const std::string& field, const char* what) const {
    if (!node.IsScalar()) fail(node, "field '" + field + "' must be " + what);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "field '" + field + "' must be " + what);
    }
  }

  double number(const YAML::Node& n, const std::string& f) const { return get<double>(n, f, "a number"); }
  int integer(const YAML::Node& n, const std::string& f) const { return get<int>(n, f, "an integer"); }
  bool boolean(const YAML::Node& n, const std::string& f) const { return get<bool>(n, f, "true or false"); }
  std::string string(const YAML::Node& n, const std::string& f) const { return get<std::string>(n, f, "a string"); }

  template <typename T>
  T parsed(const YAML::Node& n, const std::string& f, T (*parse)(std::string_view)) const {
    try {
      return parse(string(n, f));
    } catch (const Error& e) {
      if (e.code() != Errc::config) throw;
      fail(n, e.what());
    }
  }

  using Handler = std::function<void(const YAML::Node&, const std::string&)>;

  /// Dispatches each key of a mapping; unknown keys are errors.
  void section(const YAML::Node& node, const std::string& name, const std::map<std::string, Handler>& handlers) const {
    if (!node.IsMap()) fail(node, "'" + name + "' must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      auto it = handlers.find(key);
      if (it == handlers.end()) {
        fail(kv.first, "unknown field '" + (name.empty() ? key : name + "." + key) + "'");
      }
      it->second(kv.second, name.empty() ? key : name + "." + key);
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

}  // namespace

ScenarioConfig load_scenario_text(const std::string& text, const std::string& origin, ScenarioConfig cfg,
                                  const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(Errc::config, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root.IsNull()) return cfg;
  const Reader r(origin);

  // Profile sources apply after every other key, file before inline entries.
  std::optional<YAML::Node> profile_file;
  std::optional<YAML::Node> profiles;
  std::optional<double> tau_align_px;

  auto ms = [&](Micros& dst) {
    return [&r, &dst](const YAML::Node& n, const std::string& f) { dst = ms_to_us(r.number(n, f)); };
  };
  auto num = [&](double& dst) { return [&r, &dst](const YAML::Node& n, const std::string& f) { dst = r.number(n, f); }; };

  auto& noise = cfg.room.noise;
  auto& arm = cfg.room.arm;
  r.section(root, "", {
      {"route", [&](const YAML::Node& n, const std::string& f) { cfg.route = r.parsed(n, f, netem::parse_route); }},
      {"transport",
       [&](const YAML::Node& n, const std::string& f) { cfg.transport = r.parsed(n, f, session::parse_transport); }},
      {"seed",
       [&](const YAML::Node& n, const std::string& f) { cfg.seed = r.get<std::uint64_t>(n, f, "an unsigned integer"); }},
      {"n", [&](const YAML::Node& n, const std::string& f) { cfg.n = r.integer(n, f); }},
      {"qos",
       [&](const YAML::Node& n, const std::string& f) {
         const int q = r.integer(n, f);
         if (q != 0 && q != 1) r.fail(n, "field 'qos' must be 0 or 1");
         cfg.qos = q;
       }},
      {"out", [&](const YAML::Node& n, const std::string& f) { cfg.out = r.string(n, f); }},
      {"format", [&](const YAML::Node& n, const std::string& f) { cfg.format = r.string(n, f); }},
      {"realtime", [&](const YAML::Node& n, const std::string& f) { cfg.realtime = r.boolean(n, f); }},
      {"profile_file", [&](const YAML::Node& n, const std::string&) { profile_file = n; }},
      {"profiles", [&](const YAML::Node& n, const std::string&) { profiles = n; }},
      {"classes",
       [&](const YAML::Node& n, const std::string& f) {
         if (!n.IsSequence() || n.size() == 0) r.fail(n, "'classes' must be a non-empty list");
         if (n.size() > 255) r.fail(n, "at most 255 classes");
         cfg.room.classes.names.clear();
         for (const auto& c : n) cfg.room.classes.names.push_back(r.string(c, f));
       }},
      {"noise",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f, {{"recall_p", num(noise.recall_p)},
                          {"center_sigma_px", num(noise.center_sigma_px)},
                          {"frame_px", num(noise.frame_px)},
                          {"size_jitter", num(noise.size_jitter)},
                          {"conf_lo", num(noise.conf_lo)},
                          {"conf_hi", num(noise.conf_hi)},
                          {"fp_rate", num(noise.fp_rate)}});
         try {
           noise.validate();
         } catch (const Error& e) {
           r.fail(n, e.what());
         }
       }},
      {"overlay",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f,
                   {{"enabled", [&](const YAML::Node& v, const std::string& k) { cfg.room.overlay.enabled = r.boolean(v, k); }},
                    {"inference_ms", [&](const YAML::Node& v, const std::string& k) {
                       const int ms_v = r.integer(v, k);
                       if (ms_v < 0 || ms_v > 65535) r.fail(v, "field '" + k + "' must be in [0, 65535]");
                       cfg.room.overlay.inference_ms = static_cast<std::uint16_t>(ms_v);
                     }}});
       }},
      {"arm",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f, {{"slew_deg_per_s", num(arm.slew_deg_per_s)},
                          {"processing_ms", ms(arm.processing)},
                          {"tick_ms", ms(arm.tick)},
                          {"staleness_timeout_ms", ms(arm.staleness_timeout)}});
         if (!(arm.slew_deg_per_s > 0) || arm.tick <= 0 || arm.processing < 0) {
           r.fail(n, "arm needs slew_deg_per_s > 0, tick_ms > 0, processing_ms >= 0");
         }
       }},
      {"grasp",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f,
                   {{"tau_align_px",
                     [&](const YAML::Node& v, const std::string& k) { tau_align_px = r.number(v, k); }},
                    {"converge_tol_deg", num(cfg.grasp.converge_tol_deg)}});
       }},
      {"bench",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f, {{"command_hz", num(cfg.command_hz)},
                          {"video_fps", num(cfg.video_fps)},
                          {"render_ms", num(cfg.room.render_ms)},
                          {"tolerance", num(cfg.tolerance)}});
         if (!(cfg.command_hz > 0) || !(cfg.video_fps > 0)) r.fail(n, "rates must be positive");
       }},
      {"serve",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f,
                   {{"host", [&](const YAML::Node& v, const std::string& k) { cfg.serve_host = r.string(v, k); }},
                    {"port", [&](const YAML::Node& v, const std::string& k) { cfg.serve_port = r.integer(v, k); }},
                    {"camera_fps", num(cfg.camera_fps)},
                    {"room", [&](const YAML::Node& v, const std::string& k) { cfg.serve_room = r.string(v, k); }},
                    {"arm_id", [&](const YAML::Node& v, const std::string& k) { cfg.serve_arm_id = r.string(v, k); }}});
       }},
      {"udp",
       [&](const YAML::Node& n, const std::string& f) {
         r.section(n, f,
                   {{"host", [&](const YAML::Node& v, const std::string& k) { cfg.udp_host = r.string(v, k); }},
                    {"port", [&](const YAML::Node& v, const std::string& k) { cfg.udp_port = r.integer(v, k); }},
                    {"broker", [&](const YAML::Node& v, const std::string& k) { cfg.udp_broker = r.string(v, k); }},
                    {"arm_id", [&](const YAML::Node& v, const std::string& k) { cfg.udp_arm_id = r.string(v, k); }}});
       }},
  });

  // The grasp staleness rule and the arm's own timeout are one setting.
  cfg.grasp.staleness_timeout = arm.staleness_timeout;
  if (tau_align_px) cfg.grasp.tau_align = *tau_align_px / noise.frame_px;

  if (profile_file) {
    std::filesystem::path p = r.string(*profile_file, "profile_file");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    netem::load_profile_file(p.string(), cfg.profiles);
  }
  if (profiles) netem::apply_profile_list(*profiles, cfg.profiles, origin);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return load_scenario_text(ss.str(), path, std::move(base), dir.empty() ? "." : dir.string());
}

}  // namespace teleop::cli
