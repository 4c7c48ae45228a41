#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teleop/bench/scenarios.hpp"

namespace teleop::bench {

enum class Format { Text, Csv, Json };
/// "text"/"txt", "csv", "json"; throws Error{config}.
Format parse_format(std::string_view s);
/// Format implied by a file extension, Text when unknown.
Format format_for_path(std::string_view path);

struct Table2Config {
  std::vector<netem::Route> routes{netem::kAllRoutes.begin(), netem::kAllRoutes.end()};
  int n = 100;
  std::uint64_t seed = 42;
  ScenarioOptions opts{};
  double tolerance = 0.15;
  /// Control-plane transport for the control rows.
  session::TransportKind transport = session::TransportKind::PubSub;
  Execution exec = Execution::Parallel;
};

struct Table2Row {
  std::string label;
  netem::Route route = netem::Route::Local;
  LatencyKind kind = LatencyKind::Control;
  double target_ms = 0;
  /// Zoom-based column of the published table, reprinted as a static reference.
  std::string zoom_reference;
  LatencyStats stats;
  std::uint64_t lost = 0;
  bool within_tolerance = false;
};

struct Table2Report {
  std::uint64_t seed = 0;
  int n = 0;
  double tolerance = 0;
  std::vector<Table2Row> rows;

  bool passed() const;
};

/// Published rows for the selected routes, in table order, each cell an
/// independent simulation seeded from (seed, route, kind).
Table2Report run_table2(const Table2Config& cfg);

struct Table3Config {
  netem::Route route = netem::Route::Local;
  int n = 1000;
  std::uint64_t seed = 42;
  /// Defaults: the constrained profile on `route`, QoS 0.
  ScenarioOptions opts = default_table3_options();
  Execution exec = Execution::Parallel;

  static ScenarioOptions default_table3_options();
};

struct Table3Report {
  std::uint64_t seed = 0;
  int n = 0;
  int qos = 0;
  netem::NetProfile profile;
  ComparisonReport comparison;

  bool ordering_ok() const;
  bool jitter_ok() const;
  bool passed() const { return ordering_ok() && jitter_ok(); }
};

Table3Report run_table3(const Table3Config& cfg);

struct GraspConfig {
  netem::Route route = netem::Route::Japan;
  int n = 300;
  std::uint64_t seed = 42;
  ScenarioOptions opts{};
  actuator::GraspParams params{};
  double min_rate = 0.90;
  double max_rate = 0.98;
  double min_class_rate = 0.85;
};

struct GraspReport {
  std::uint64_t seed = 0;
  GraspConfig bounds;
  CampaignReport campaign;

  bool passed() const;
};

GraspReport run_grasp(const GraspConfig& cfg);

std::string render(const Table2Report& r, Format f);
std::string render(const Table3Report& r, Format f);
std::string render(const GraspReport& r, Format f);

}  // namespace teleop::bench
