#pragma once

// End-to-end planning run: buildings -> demand -> stops -> travel matrices ->
// routes -> metrics -> impact summary (and an optional comparison against an
// observed baseline scenario).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wastecollect/coverage.hpp"
#include "wastecollect/error.hpp"
#include "wastecollect/impact.hpp"
#include "wastecollect/key_values.hpp"
#include "wastecollect/road_network.hpp"
#include "wastecollect/route_geometry.hpp"
#include "wastecollect/vrp.hpp"

namespace wastecollect {

// A library error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "[" + stage + "] " + strip_kind(cause)), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  static std::string strip_kind(const Error& e) {
    const std::string what = e.what();
    const auto prefix = std::string(to_string(e.kind())) + ": ";
    return what.starts_with(prefix) ? what.substr(prefix.size()) : what;
  }
  std::string stage_;
};

// Process exit status for each error kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kUncoverableDemand:
    case ErrorKind::kInfeasibleStop:
    case ErrorKind::kUnreachableStop:
    case ErrorKind::kUnreachable:
    case ErrorKind::kShiftTooShort:
    case ErrorKind::kTooLarge:
      return 3;
    default:
      return 4;
  }
}

struct ScenarioConfig {
  std::string name = "Proposed";
  std::string nodes_path;
  std::string edges_path;
  std::string turns_path;
  std::string buildings_path;
  double depot_x_m = 0.0;
  double depot_y_m = 0.0;
  double depot_snap_max_m = 1000.0;
  CoverageConfig coverage;
  FleetSpec fleet;
  Metric objective = Metric::kTime;
  std::uint64_t seed = 1;
  SolverOptions solver;
  unsigned workers = 0;
  double generation_rate_kg_unit_day = kDefaultGenerationRate;
  std::string factors_path;
  std::string truck_class;
  std::optional<ScenarioSummary> existing;
  // Replaces the computed summary in the comparison when present.
  std::optional<ScenarioSummary> proposed_override;

  void validate() const {
    for (const auto* p : {&nodes_path, &edges_path, &buildings_path}) {
      if (p->empty()) throw Error(ErrorKind::kConfig, "network and buildings paths are required");
      if (!std::filesystem::exists(*p)) throw Error(ErrorKind::kConfig, "file not found: " + *p);
    }
    for (const auto* p : {&turns_path, &factors_path}) {
      if (!p->empty() && !std::filesystem::exists(*p)) throw Error(ErrorKind::kConfig, "file not found: " + *p);
    }
    if (!(generation_rate_kg_unit_day > 0.0)) throw Error(ErrorKind::kConfig, "generation rate must be > 0");
    if (!(depot_snap_max_m > 0.0)) throw Error(ErrorKind::kConfig, "depot snap distance must be > 0");
    try {
      coverage.validate();
      fleet.validate();
      if (existing) existing->validate();
      if (proposed_override) proposed_override->validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, e.what());
    }
  }
};

inline ScenarioConfig load_config(const KeyValues& kv) {
  ScenarioConfig cfg;
  try {
    cfg.name = kv.str("name", cfg.name);
    cfg.nodes_path = kv.path("network.nodes");
    cfg.edges_path = kv.path("network.edges");
    if (kv.has("network.turns")) cfg.turns_path = kv.path("network.turns");
    cfg.buildings_path = kv.path("buildings");
    cfg.generation_rate_kg_unit_day = kv.number("generation_rate_kg_unit_day", cfg.generation_rate_kg_unit_day);

    cfg.depot_x_m = kv.number("depot.x_m");
    cfg.depot_y_m = kv.number("depot.y_m");
    cfg.depot_snap_max_m = kv.number("depot.snap_max_m", cfg.depot_snap_max_m);

    auto& f = cfg.fleet;
    f.capacity_kg = kv.number("fleet.capacity_kg", f.capacity_kg);
    f.speed_kmh = kv.number("fleet.speed_kmh", f.speed_kmh);
    f.stop_service_s = kv.number("fleet.stop_service_s", f.stop_service_s);
    f.unload_s = kv.number("fleet.unload_s", f.unload_s);
    f.shift_s = kv.number("fleet.shift_s", f.shift_s);
    f.crew_size = static_cast<int>(kv.integer("fleet.crew_size", f.crew_size));

    auto& c = cfg.coverage;
    c.radius_m = kv.number("coverage.radius_m", c.radius_m);
    c.distance_mode = parse_distance_mode(kv.str("coverage.distance_mode", std::string(to_string(c.distance_mode))));
    c.max_stop_load_kg = kv.number("coverage.max_stop_load_kg", c.max_stop_load_kg);
    // The stop dwell time defaults to the fleet's per-stop collection time.
    c.service_time_s = kv.number("coverage.service_time_s", f.stop_service_s);
    if (kv.has("coverage.candidate_nodes")) {
      std::vector<NodeId> ids;
      for (const auto& field : text::split(kv.str("coverage.candidate_nodes"), ';')) {
        ids.push_back(text::parse_int(field, "coverage.candidate_nodes"));
      }
      c.candidate_nodes = std::move(ids);
    }

    cfg.objective = parse_metric(kv.str("solver.objective", "time"));
    cfg.seed = static_cast<std::uint64_t>(kv.integer("solver.seed", 1));
    cfg.solver.restarts = static_cast<int>(kv.integer("solver.restarts", cfg.solver.restarts));
    cfg.workers = static_cast<unsigned>(kv.integer("solver.workers", 0));

    if (kv.has("impact.factors")) cfg.factors_path = kv.path("impact.factors");
    cfg.truck_class = kv.str("impact.truck_class", "");
    if (kv.has_section("existing")) cfg.existing = read_summary(kv, "existing");
    if (kv.has_section("proposed")) cfg.proposed_override = read_summary(kv, "proposed");
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw Error(ErrorKind::kConfig, kv.source() + ": unknown key '" + unused.front() + "'");
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) { return load_config(KeyValues::read_file(path)); }

struct PipelineResult {
  RoadNetwork network;
  std::vector<DemandPoint> demands;
  std::vector<StopPoint> stops;
  Depot depot;
  RoutePlan plan;
  RouteMetrics metrics;
  ScenarioSummary summary;
  std::optional<ComparisonReport> report;
  nlohmann::json geometry;
};

namespace detail {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

inline void require_same_mass(double a, double b, const char* what) {
  if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
    throw Error(ErrorKind::kInvalidArgument, std::string("waste mass not conserved across ") + what);
  }
}

}  // namespace detail

inline PipelineResult run_pipeline(const ScenarioConfig& cfg) {
  PipelineResult out;
  out.network = detail::stage("network/load", [&] {
    return read_network(cfg.nodes_path, cfg.edges_path, cfg.turns_path, cfg.fleet.speed_kmh);
  });
  out.depot.node = detail::stage("network/snap", [&] {
    return snap(out.network, cfg.depot_x_m, cfg.depot_y_m, cfg.depot_snap_max_m);
  });
  out.demands = detail::stage("demand", [&] {
    return aggregate_demand(read_buildings(cfg.buildings_path), cfg.generation_rate_kg_unit_day);
  });
  out.stops = detail::stage("coverage", [&] {
    auto stops = place_stops(out.network, out.demands, cfg.coverage);
    const auto audit = verify_coverage(stops, out.demands, out.network, cfg.coverage);
    if (!audit.ok() || !audit.overloaded_stops.empty()) {
      throw Error(ErrorKind::kUncoverableDemand, "stop placement failed its coverage audit");
    }
    return stops;
  });
  const auto matrices = detail::stage("matrix", [&] {
    std::vector<NodeId> nodes{out.depot.node};
    for (const auto& s : out.stops) nodes.push_back(s.node);
    return travel_matrices(out.network, nodes, cfg.objective, cfg.workers);
  });
  out.plan = detail::stage("vrp", [&] {
    auto plan = solve_vrp(matrices, out.stops, out.depot, cfg.fleet, cfg.objective, cfg.seed, cfg.solver);
    if (const auto problem = check_plan(plan, out.stops, cfg.fleet); !problem.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "solver produced an invalid plan: " + problem);
    }
    return plan;
  });
  out.metrics = detail::stage("metrics", [&] {
    double demand_kg = 0.0;
    double stop_kg = 0.0;
    double trip_kg = 0.0;
    for (const auto& d : out.demands) demand_kg += d.waste_kg_day;
    for (const auto& s : out.stops) stop_kg += s.assigned_demand_kg;
    for (const auto& t : out.plan.all_trips()) trip_kg += t.load_kg;
    detail::require_same_mass(demand_kg, stop_kg, "demand and stops");
    detail::require_same_mass(stop_kg, trip_kg, "stops and trips");
    return route_metrics(out.plan);
  });
  out.summary = detail::stage("impact", [&] {
    ImpactFactors factors;
    if (!cfg.factors_path.empty()) {
      const auto table = read_factors(cfg.factors_path);
      const std::string cls = cfg.truck_class.empty() ? table.begin()->first : cfg.truck_class;
      const auto it = table.find(cls);
      if (it == table.end()) throw Error(ErrorKind::kConfig, "no impact factors for truck class '" + cls + "'");
      factors = it->second;
    }
    return summarize_plan(cfg.name, out.metrics, cfg.fleet, out.stops.size(), factors);
  });
  if (cfg.existing) {
    out.report = detail::stage("impact", [&] {
      return compare_scenarios(*cfg.existing, cfg.proposed_override.value_or(out.summary));
    });
  }
  out.geometry = detail::stage("output", [&] { return emit_route_geometry(out.plan, out.stops, out.depot, out.network); });
  return out;
}

struct OutputFiles {
  std::string stops;
  std::string plan;
  std::string routes;
  std::string summary;
  std::string report;
};

inline OutputFiles write_outputs(const PipelineResult& r, const std::string& dir, ReportFormat format) {
  return detail::stage("output", [&] {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    OutputFiles files{(base / "stops.csv").string(), (base / "plan.csv").string(),
                      (base / "routes.geojson").string(), (base / "summary.txt").string(), {}};
    write_stops(r.stops, files.stops);
    write_plan(r.plan, files.plan);
    write_route_geometry(r.geometry, files.routes);
    {
      std::ofstream s(files.summary);
      if (!s) throw Error(ErrorKind::kIo, "cannot write " + files.summary);
      write_summary(r.summary, s);
    }
    if (r.report) {
      files.report = (base / (format == ReportFormat::kTable ? "report.csv" : "report.txt")).string();
      std::ofstream rep(files.report);
      if (!rep) throw Error(ErrorKind::kIo, "cannot write " + files.report);
      write_report(*r.report, format, rep);
    }
    return files;
  });
}

}  // namespace wastecollect
