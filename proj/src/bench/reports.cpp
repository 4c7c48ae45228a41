#include "teleop/bench/reports.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

namespace teleop::bench {

using json = nlohmann::ordered_json;
using netem::Route;

Format parse_format(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "text" || lower == "txt") return Format::Text;
  if (lower == "csv") return Format::Csv;
  if (lower == "json") return Format::Json;
  throw Error(Errc::config, "unknown report format '" + std::string(s) + "'");
}

Format format_for_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return Format::Text;
  try {
    return parse_format(path.substr(dot + 1));
  } catch (const Error&) {
    return Format::Text;
  }
}

namespace {

struct RowSpec {
  const char* label;
  Route route;
  LatencyKind kind;
  double target_ms;
  const char* zoom;
};

constexpr RowSpec kTable2[] = {
    {"Local Control Signal Latency", Route::Local, LatencyKind::Control, 200, "~1.0-2.0 s"},
    {"Local Video Latency (No AI Processing)", Route::Local, LatencyKind::Video, 500, "0.8-1.2 s"},
    {"Video Latency with AI Overlay (YOLO)", Route::Local, LatencyKind::VideoOverlay, 700, "not supported"},
    {"Remote Control Latency -- Hong Kong (VPN)", Route::HongKong, LatencyKind::Control, 300, "1.5-2.2 s"},
    {"Remote Video Latency -- Hong Kong (VPN)", Route::HongKong, LatencyKind::Video, 600, "1.6-2.0 s"},
    {"Remote YOLO Video Delay -- Hong Kong", Route::HongKong, LatencyKind::VideoOverlay, 800, "N/A"},
    {"Remote Control Latency -- Japan (VPN)", Route::Japan, LatencyKind::Control, 500, "1.8-2.5 s"},
    {"Remote YOLO Video Delay -- Japan", Route::Japan, LatencyKind::VideoOverlay, 1200, "N/A"},
    {"Remote Control Latency -- Belgium (VPN)", Route::Belgium, LatencyKind::Control, 700, "2.0-3.0 s"},
    {"Remote YOLO Video Delay -- Belgium", Route::Belgium, LatencyKind::VideoOverlay, 1100, "N/A"},
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string f1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

double r3(double v) { return std::round(v * 1000.0) / 1000.0; }

json stats_json(const LatencyStats& s) {
  json j;
  j["n"] = s.n;
  j["mean_ms"] = r3(s.mean_ms);
  j["p50_ms"] = r3(s.p50_ms);
  j["p95_ms"] = r3(s.p95_ms);
  j["stddev_ms"] = r3(s.stddev_ms);
  j["jitter_class"] = to_string(s.jitter);
  return j;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string display_name(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

}  // namespace

bool Table2Report::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.within_tolerance; });
}

Table2Report run_table2(const Table2Config& cfg) {
  std::vector<RowSpec> specs;
  for (const auto& spec : kTable2) {
    if (std::find(cfg.routes.begin(), cfg.routes.end(), spec.route) != cfg.routes.end()) specs.push_back(spec);
  }
  std::vector<Table2Row> rows(specs.size());
  std::vector<std::exception_ptr> failures(specs.size());
  const int cells = static_cast<int>(specs.size());

#pragma omp parallel for schedule(dynamic) if (cfg.exec == Execution::Parallel)
  for (int i = 0; i < cells; ++i) {
    const auto& spec = specs[static_cast<std::size_t>(i)];
    const std::uint64_t seed = derive_seed(
        cfg.seed, std::string(netem::to_string(spec.route)) + "/" + std::string(to_string(spec.kind)));
    try {
      RunResult run = spec.kind == LatencyKind::Control
                          ? run_control_latency(spec.route, cfg.transport, cfg.n, seed, cfg.opts)
                          : run_video_latency(spec.route, spec.kind == LatencyKind::VideoOverlay, cfg.n, seed,
                                              cfg.opts);
      auto& row = rows[static_cast<std::size_t>(i)];
      row.label = spec.label;
      row.route = spec.route;
      row.kind = spec.kind;
      row.target_ms = spec.target_ms;
      row.zoom_reference = spec.zoom;
      row.stats = run.stats;
      row.lost = run.lost;
      row.within_tolerance = std::abs(run.stats.mean_ms - spec.target_ms) <= cfg.tolerance * spec.target_ms;
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  Table2Report report;
  report.seed = cfg.seed;
  report.n = cfg.n;
  report.tolerance = cfg.tolerance;
  report.rows = std::move(rows);
  return report;
}

ScenarioOptions Table3Config::default_table3_options() {
  ScenarioOptions opts;
  opts.profiles.set_control(Route::Local, netem::constrained_profile());
  opts.room.control_qos = msgbus::QoS::AtMostOnce;
  return opts;
}

bool Table3Report::ordering_ok() const {
  return comparison.pubsub().run.stats.mean_ms < comparison.stream().run.stats.mean_ms;
}

bool Table3Report::jitter_ok() const {
  return comparison.pubsub().run.stats.jitter == JitterClass::Low &&
         comparison.stream().run.stats.jitter == JitterClass::Medium;
}

Table3Report run_table3(const Table3Config& cfg) {
  Table3Report r;
  r.seed = cfg.seed;
  r.n = cfg.n;
  r.qos = static_cast<int>(cfg.opts.room.control_qos);
  r.profile = cfg.opts.profiles.control(cfg.route);
  r.comparison = compare_transports(cfg.route, cfg.n, cfg.seed, cfg.opts, cfg.exec);
  return r;
}

bool GraspReport::passed() const {
  const double rate = campaign.success_rate();
  if (rate < bounds.min_rate || rate > bounds.max_rate) return false;
  return std::all_of(campaign.per_class.begin(), campaign.per_class.end(),
                     [&](const ClassOutcome& c) { return c.trials == 0 || c.rate() >= bounds.min_class_rate; });
}

GraspReport run_grasp(const GraspConfig& cfg) {
  GraspReport r;
  r.seed = cfg.seed;
  r.bounds = cfg;
  r.campaign = run_grasp_campaign(cfg.route, cfg.n, cfg.seed, cfg.opts, cfg.params);
  return r;
}

std::string render(const Table2Report& r, Format f) {
  if (f == Format::Json) {
    json j;
    j["report"] = "table2";
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["tolerance"] = r.tolerance;
    j["rows"] = json::array();
    for (const auto& row : r.rows) {
      json jr;
      jr["label"] = row.label;
      jr["route"] = netem::to_string(row.route);
      jr["kind"] = to_string(row.kind);
      jr["target_ms"] = row.target_ms;
      jr["zoom_reference_static"] = row.zoom_reference;
      jr["stats"] = stats_json(row.stats);
      jr["lost"] = row.lost;
      jr["within_tolerance"] = row.within_tolerance;
      j["rows"].push_back(jr);
    }
    j["passed"] = r.passed();
    return j.dump(2) + "\n";
  }
  if (f == Format::Csv) {
    std::string out =
        "label,route,kind,target_ms,mean_ms,p50_ms,p95_ms,stddev_ms,n,lost,within_tolerance,zoom_reference_static\n";
    for (const auto& row : r.rows) {
      out += csv_quote(row.label) + "," + std::string(netem::to_string(row.route)) + "," +
             std::string(to_string(row.kind)) + "," + f3(row.target_ms) + "," + f3(row.stats.mean_ms) + "," +
             f3(row.stats.p50_ms) + "," + f3(row.stats.p95_ms) + "," + f3(row.stats.stddev_ms) + "," +
             std::to_string(row.stats.n) + "," + std::to_string(row.lost) + "," +
             (row.within_tolerance ? "true" : "false") + "," + csv_quote(row.zoom_reference) + "\n";
    }
    return out;
  }
  std::string out;
  char line[320];
  std::snprintf(line, sizeof line, "Latency comparison (emulated network, n=%d per cell, seed=%llu, tolerance %.0f%%)\n",
                r.n, static_cast<unsigned long long>(r.seed), r.tolerance * 100);
  out += line;
  std::snprintf(line, sizeof line, "%-42s %-16s %9s %9s %9s %9s %9s  %s\n", "Metric / Condition",
                "Zoom (reference)", "Target", "Mean", "p50", "p95", "Stddev", "Status");
  out += line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-42s %-16s %9s %9s %9s %9s %9s  %s\n", row.label.c_str(),
                  row.zoom_reference.c_str(), f1(row.target_ms).c_str(), f1(row.stats.mean_ms).c_str(),
                  f1(row.stats.p50_ms).c_str(), f1(row.stats.p95_ms).c_str(), f1(row.stats.stddev_ms).c_str(),
                  verdict(row.within_tolerance));
    out += line;
  }
  out += "Latencies in ms. The Zoom column holds fixed reference values and is not simulated.\n";
  out += std::string("Overall: ") + verdict(r.passed()) + "\n";
  return out;
}

std::string render(const Table3Report& r, Format f) {
  const auto& cmp = r.comparison;
  if (f == Format::Json) {
    json j;
    j["report"] = "table3";
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["qos"] = r.qos;
    j["profile"] = {{"name", r.profile.name},
                    {"base_owd_ms", r.profile.base_owd_ms},
                    {"jitter_sigma_ms", r.profile.jitter_sigma_ms},
                    {"loss_rate", r.profile.loss_rate},
                    {"bandwidth_penalty_ms_per_kb", r.profile.bandwidth_penalty_ms_per_kb}};
    j["transports"] = json::array();
    for (const auto& t : cmp.results) {
      json jt;
      jt["transport"] = session::to_string(t.transport);
      jt["stats"] = stats_json(t.run.stats);
      jt["sent"] = t.run.sent;
      jt["lost"] = t.run.lost;
      jt["setup_ms"] = r3(t.run.setup_ms);
      j["transports"].push_back(jt);
    }
    j["ordering_ok"] = r.ordering_ok();
    j["jitter_ok"] = r.jitter_ok();
    j["passed"] = r.passed();
    return j.dump(2) + "\n";
  }
  if (f == Format::Csv) {
    std::string out = "transport,mean_ms,p50_ms,p95_ms,stddev_ms,jitter_class,n,sent,lost,setup_ms\n";
    for (const auto& t : cmp.results) {
      const auto& s = t.run.stats;
      out += std::string(session::to_string(t.transport)) + "," + f3(s.mean_ms) + "," + f3(s.p50_ms) + "," +
             f3(s.p95_ms) + "," + f3(s.stddev_ms) + "," + std::string(to_string(s.jitter)) + "," +
             std::to_string(s.n) + "," + std::to_string(t.run.sent) + "," + std::to_string(t.run.lost) + "," +
             f3(t.run.setup_ms) + "\n";
    }
    return out;
  }
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line,
                "Control transport comparison (profile %s: owd %.0f ms, jitter %.0f ms, loss %.1f%%; qos %d; n=%d; seed=%llu)\n",
                r.profile.name.c_str(), r.profile.base_owd_ms, r.profile.jitter_sigma_ms, r.profile.loss_rate * 100,
                r.qos, r.n, static_cast<unsigned long long>(r.seed));
  out += line;
  std::snprintf(line, sizeof line, "%-14s %17s %19s %9s %9s %9s %6s %9s\n", "Protocol", "Avg Latency (ms)",
                "Stability (Jitter)", "Stddev", "p50", "p95", "Lost", "Setup");
  out += line;
  for (const auto& t : cmp.results) {
    const auto& s = t.run.stats;
    std::snprintf(line, sizeof line, "%-14s %17s %19s %9s %9s %9s %6llu %9s\n",
                  t.transport == session::TransportKind::PubSub ? "PubSub" : "OrderedStream", f1(s.mean_ms).c_str(),
                  std::string(to_string(s.jitter)).c_str(), f1(s.stddev_ms).c_str(), f1(s.p50_ms).c_str(),
                  f1(s.p95_ms).c_str(), static_cast<unsigned long long>(t.run.lost), f1(t.run.setup_ms).c_str());
    out += line;
  }
  out += std::string("mean(PubSub) < mean(OrderedStream): ") + verdict(r.ordering_ok()) + "\n";
  out += std::string("jitter classes Low / Medium: ") + verdict(r.jitter_ok()) + "\n";
  out += std::string("Overall: ") + verdict(r.passed()) + "\n";
  return out;
}

std::string render(const GraspReport& r, Format f) {
  const auto& c = r.campaign;
  if (f == Format::Json) {
    json j;
    j["report"] = "grasp";
    j["seed"] = r.seed;
    j["route"] = netem::to_string(c.route);
    j["trials"] = c.trials;
    j["successes"] = c.successes;
    j["success_rate"] = r3(c.success_rate());
    j["per_class"] = json::array();
    for (const auto& k : c.per_class) {
      j["per_class"].push_back(
          {{"class", k.name}, {"trials", k.trials}, {"successes", k.successes}, {"success_rate", r3(k.rate())}});
    }
    j["failure_reasons"] = json::object();
    for (const auto& [reason, count] : c.failure_reasons) j["failure_reasons"][reason] = count;
    j["bounds"] = {{"min_rate", r.bounds.min_rate},
                   {"max_rate", r.bounds.max_rate},
                   {"min_class_rate", r.bounds.min_class_rate}};
    j["passed"] = r.passed();
    return j.dump(2) + "\n";
  }
  if (f == Format::Csv) {
    std::string out = "class,trials,successes,success_rate\n";
    out += "all," + std::to_string(c.trials) + "," + std::to_string(c.successes) + "," + f3(c.success_rate()) + "\n";
    for (const auto& k : c.per_class) {
      out += k.name + "," + std::to_string(k.trials) + "," + std::to_string(k.successes) + "," + f3(k.rate()) + "\n";
    }
    return out;
  }
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "Grasp campaign (route %s, %llu trials, seed=%llu)\n",
                std::string(netem::to_string(c.route)).c_str(), static_cast<unsigned long long>(c.trials),
                static_cast<unsigned long long>(r.seed));
  out += line;
  std::snprintf(line, sizeof line, "%-20s %8s %10s %8s\n", "Class", "Trials", "Successes", "Rate");
  out += line;
  std::snprintf(line, sizeof line, "%-20s %8llu %10llu %8s\n", "all", static_cast<unsigned long long>(c.trials),
                static_cast<unsigned long long>(c.successes), f3(c.success_rate()).c_str());
  out += line;
  for (const auto& k : c.per_class) {
    std::snprintf(line, sizeof line, "%-20s %8llu %10llu %8s\n", display_name(k.name).c_str(),
                  static_cast<unsigned long long>(k.trials), static_cast<unsigned long long>(k.successes),
                  f3(k.rate()).c_str());
    out += line;
  }
  for (const auto& [reason, count] : c.failure_reasons) {
    std::snprintf(line, sizeof line, "failure: %s x%llu\n", reason.c_str(), static_cast<unsigned long long>(count));
    out += line;
  }
  std::snprintf(line, sizeof line, "Bounds: overall in [%.2f, %.2f], each class >= %.2f: %s\n", r.bounds.min_rate,
                r.bounds.max_rate, r.bounds.min_class_rate, verdict(r.passed()));
  out += line;
  return out;
}

}  // namespace teleop::bench
