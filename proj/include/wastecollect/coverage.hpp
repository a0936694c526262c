#pragma once

// Household demand aggregation and collection stop placement.
//
// Stops are opened greedily: each round opens the candidate node that can
// take the largest mass of still-uncovered demand within the service radius,
// filling it nearest-first up to the per-stop load cap. A final pass moves
// each demand to a strictly nearer open stop when that stop has room.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wastecollect/error.hpp"
#include "wastecollect/road_network.hpp"
#include "wastecollect/text_table.hpp"

namespace wastecollect {

using DemandId = std::int64_t;
using StopId = std::int64_t;

inline constexpr double kDefaultGenerationRate = 2.49;  // kg per dwelling unit per day

struct Building {
  DemandId id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  std::int64_t dwelling_units = 0;
};

struct DemandPoint {
  DemandId id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  std::int64_t dwelling_units = 0;
  double waste_kg_day = 0.0;
};

struct StopPoint {
  StopId id = 0;
  NodeId node = 0;
  double assigned_demand_kg = 0.0;
  double service_time_s = 0.0;
  std::vector<DemandId> covered_demand_ids;
  // Set when a single demand point alone exceeds the load cap.
  bool overflow = false;
};

enum class DistanceMode { kNetwork, kEuclidean };

inline std::string_view to_string(DistanceMode m) { return m == DistanceMode::kNetwork ? "network" : "euclidean"; }

inline DistanceMode parse_distance_mode(std::string_view s) {
  if (s == "network") return DistanceMode::kNetwork;
  if (s == "euclidean") return DistanceMode::kEuclidean;
  throw Error(ErrorKind::kConfig, "unknown distance mode '" + std::string(s) + "' (expected network|euclidean)");
}

struct CoverageConfig {
  double radius_m = 300.0;
  DistanceMode distance_mode = DistanceMode::kNetwork;
  double max_stop_load_kg = 520.0;
  std::optional<std::vector<NodeId>> candidate_nodes;
  double service_time_s = 1800.0;

  void validate() const {
    if (!(radius_m > 0.0)) throw Error(ErrorKind::kInvalidArgument, "coverage radius must be > 0");
    if (!(max_stop_load_kg > 0.0)) throw Error(ErrorKind::kInvalidArgument, "max stop load must be > 0");
    if (!(service_time_s > 0.0)) throw Error(ErrorKind::kInvalidArgument, "stop service time must be > 0");
  }
};

inline std::vector<DemandPoint> aggregate_demand(std::span<const Building> buildings, double rate_kg_per_unit_day) {
  if (!(rate_kg_per_unit_day > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "generation rate must be > 0");
  }
  std::vector<DemandPoint> out;
  out.reserve(buildings.size());
  for (const Building& b : buildings) {
    if (b.dwelling_units < 0) {
      throw Error(ErrorKind::kNegativeUnits, "building " + std::to_string(b.id) + " has negative dwelling units");
    }
    out.push_back(DemandPoint{b.id, b.x_m, b.y_m, b.dwelling_units,
                              static_cast<double>(b.dwelling_units) * rate_kg_per_unit_day});
  }
  return out;
}

namespace detail {

// Distance from a demand point to a network node under the configured mode.
// Network mode walks the street graph (both directions) from the demand's
// nearest node and adds the straight access leg to that node.
class CoverageMetric {
 public:
  CoverageMetric(const RoadNetwork& net, const CoverageConfig& cfg) : net_(net), cfg_(cfg) {}

  // Distances to every node index within the radius; others kUnreachable.
  // Returns nullopt when the demand cannot be attached to the network.
  std::optional<std::vector<double>> reach(const DemandPoint& d) const {
    const auto n = net_.node_count();
    std::vector<double> out(n, kUnreachable);
    if (cfg_.distance_mode == DistanceMode::kEuclidean) {
      for (std::size_t i = 0; i < n; ++i) {
        const Node& node = net_.node_at(i);
        const double dist = euclidean(d.x_m, d.y_m, node.x_m, node.y_m);
        if (dist <= cfg_.radius_m) out[i] = dist;
      }
      return out;
    }
    NodeId attach = 0;
    try {
      attach = snap(net_, d.x_m, d.y_m, cfg_.radius_m);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoNodeWithinRange) return std::nullopt;
      throw;
    }
    const Node& a = net_.node(attach);
    const double access = euclidean(d.x_m, d.y_m, a.x_m, a.y_m);
    const auto walk = walking_distances(net_, net_.index_of(attach), cfg_.radius_m - access);
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_unreachable(walk[i])) out[i] = access + walk[i];
    }
    return out;
  }

 private:
  const RoadNetwork& net_;
  const CoverageConfig& cfg_;
};

inline std::vector<NodeId> candidate_ids(const RoadNetwork& net, const CoverageConfig& cfg) {
  std::vector<NodeId> ids;
  if (cfg.candidate_nodes) {
    ids = *cfg.candidate_nodes;
    for (const NodeId id : ids) net.index_of(id);
  } else {
    for (const Node& n : net.nodes()) ids.push_back(n.id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw Error(ErrorKind::kInvalidArgument, "candidate stop set is empty");
  return ids;
}

}  // namespace detail

inline std::vector<StopPoint> place_stops(const RoadNetwork& net, std::span<const DemandPoint> demands,
                                          const CoverageConfig& cfg) {
  cfg.validate();
  const auto candidates = detail::candidate_ids(net, cfg);
  const detail::CoverageMetric metric(net, cfg);
  const double cap = cfg.max_stop_load_kg;

  // reach[d] = (candidate position, distance) pairs within the radius.
  struct Reach {
    std::size_t candidate;
    double dist;
  };
  std::vector<std::vector<Reach>> reach(demands.size());
  // covers[c] = demand positions within the radius of candidate c.
  std::vector<std::vector<std::size_t>> covers(candidates.size());
  for (std::size_t d = 0; d < demands.size(); ++d) {
    const auto dist = metric.reach(demands[d]);
    if (dist) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double v = (*dist)[net.index_of(candidates[c])];
        if (!is_unreachable(v)) {
          reach[d].push_back({c, v});
          covers[c].push_back(d);
        }
      }
    }
    if (reach[d].empty()) {
      throw Error(ErrorKind::kUncoverableDemand, "demand point " + std::to_string(demands[d].id) +
                                                     " has no candidate stop within " +
                                                     text::format_double(cfg.radius_m) + " m");
    }
  }
  auto distance_to = [&](std::size_t d, std::size_t c) {
    for (const Reach& r : reach[d]) {
      if (r.candidate == c) return r.dist;
    }
    return kUnreachable;
  };

  struct Open {
    std::size_t candidate;
    std::vector<std::size_t> members;
    double load = 0.0;
    bool overflow = false;
  };
  std::vector<Open> open;
  std::vector<char> covered(demands.size(), 0);
  std::size_t remaining = demands.size();

  // A demand heavier than the cap gets a dedicated stop at its nearest candidate.
  for (std::size_t d = 0; d < demands.size(); ++d) {
    if (demands[d].waste_kg_day <= cap) continue;
    const Reach* best = &reach[d].front();
    for (const Reach& r : reach[d]) {
      if (r.dist < best->dist) best = &r;
    }
    open.push_back(Open{best->candidate, {d}, demands[d].waste_kg_day, true});
    covered[d] = 1;
    --remaining;
  }

  // Nearest-first packing of uncovered demands around candidate c.
  auto pack = [&](std::size_t c) {
    std::vector<std::pair<double, std::size_t>> order;
    for (const std::size_t d : covers[c]) {
      if (!covered[d]) order.emplace_back(distance_to(d, c), d);
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : demands[a.second].id < demands[b.second].id;
    });
    Open stop{c, {}, 0.0, false};
    for (const auto& [dist, d] : order) {
      if (stop.load + demands[d].waste_kg_day <= cap) {
        stop.load += demands[d].waste_kg_day;
        stop.members.push_back(d);
      }
    }
    return stop;
  };

  while (remaining > 0) {
    std::optional<Open> best;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (covers[c].empty()) continue;
      Open trial = pack(c);
      if (trial.members.empty()) continue;
      // Candidates are scanned in ascending id, so only a strictly larger
      // (mass, count) replaces the incumbent.
      if (!best || trial.load > best->load ||
          (trial.load == best->load && trial.members.size() > best->members.size())) {
        best = std::move(trial);
      }
    }
    for (const std::size_t d : best->members) covered[d] = 1;
    remaining -= best->members.size();
    open.push_back(std::move(*best));
  }

  // Move demands to a strictly nearer open stop when it has room. Equal
  // distances keep the earlier (smaller id) stop.
  std::vector<std::size_t> home(demands.size());
  for (std::size_t s = 0; s < open.size(); ++s) {
    for (const std::size_t d : open[s].members) home[d] = s;
  }
  constexpr double kCloser = 1e-9;
  for (std::size_t d = 0; d < demands.size(); ++d) {
    const std::size_t cur = home[d];
    if (open[cur].overflow) continue;
    std::size_t target = cur;
    double target_dist = distance_to(d, open[cur].candidate);
    for (std::size_t s = 0; s < open.size(); ++s) {
      if (s == cur || open[s].overflow) continue;
      const double dist = distance_to(d, open[s].candidate);
      if (is_unreachable(dist) || dist >= target_dist - kCloser) continue;
      if (open[s].load + demands[d].waste_kg_day > cap) continue;
      target = s;
      target_dist = dist;
    }
    if (target != cur) {
      open[cur].load -= demands[d].waste_kg_day;
      open[target].load += demands[d].waste_kg_day;
      home[d] = target;
    }
  }
  std::vector<std::vector<std::size_t>> members(open.size());
  for (std::size_t d = 0; d < demands.size(); ++d) members[home[d]].push_back(d);

  std::vector<StopPoint> stops;
  for (std::size_t s = 0; s < open.size(); ++s) {
    if (members[s].empty()) continue;
    StopPoint stop;
    stop.id = static_cast<StopId>(stops.size() + 1);
    stop.node = candidates[open[s].candidate];
    stop.service_time_s = cfg.service_time_s;
    stop.overflow = open[s].overflow;
    auto ids = members[s];
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return demands[a].id < demands[b].id; });
    for (const std::size_t d : ids) {
      stop.covered_demand_ids.push_back(demands[d].id);
      stop.assigned_demand_kg += demands[d].waste_kg_day;
    }
    stops.push_back(std::move(stop));
  }
  return stops;
}

struct CoverageReport {
  std::vector<DemandId> uncovered;
  // Demands claimed by more than one stop.
  std::vector<DemandId> duplicated;
  // Covered ids that match no demand point.
  std::vector<DemandId> unknown;
  std::vector<StopId> overloaded_stops;
  double max_load_kg = 0.0;
  double total_assigned_kg = 0.0;
  // Ten equal bins over [0, max_stop_load_kg] plus one bin for anything above.
  std::vector<std::size_t> load_histogram;
  double bin_width_kg = 0.0;

  bool ok() const { return uncovered.empty() && duplicated.empty() && unknown.empty(); }
};

inline CoverageReport verify_coverage(std::span<const StopPoint> stops, std::span<const DemandPoint> demands,
                                      const RoadNetwork& net, const CoverageConfig& cfg) {
  constexpr std::size_t kBins = 10;
  constexpr double kSlack = 1e-9;
  CoverageReport report;
  report.bin_width_kg = cfg.max_stop_load_kg / kBins;
  report.load_histogram.assign(kBins + 1, 0);

  std::unordered_map<DemandId, std::size_t> position;
  for (std::size_t d = 0; d < demands.size(); ++d) position.emplace(demands[d].id, d);

  const detail::CoverageMetric metric(net, cfg);
  std::vector<std::optional<std::vector<double>>> reach(demands.size());
  std::vector<char> reach_done(demands.size(), 0);
  std::vector<int> valid_claims(demands.size(), 0);

  for (const StopPoint& stop : stops) {
    report.max_load_kg = std::max(report.max_load_kg, stop.assigned_demand_kg);
    report.total_assigned_kg += stop.assigned_demand_kg;
    const auto bin = std::min<std::size_t>(
        kBins, static_cast<std::size_t>(std::max(0.0, stop.assigned_demand_kg) / report.bin_width_kg));
    const bool exactly_full = stop.assigned_demand_kg == cfg.max_stop_load_kg;
    ++report.load_histogram[exactly_full ? kBins - 1 : bin];
    // A lone demand heavier than the cap is an allowed overflow.
    if (stop.assigned_demand_kg > cfg.max_stop_load_kg && stop.covered_demand_ids.size() > 1) {
      report.overloaded_stops.push_back(stop.id);
    }

    const bool node_known = net.contains(stop.node);
    for (const DemandId id : stop.covered_demand_ids) {
      const auto it = position.find(id);
      if (it == position.end()) {
        report.unknown.push_back(id);
        continue;
      }
      const std::size_t d = it->second;
      if (!node_known) continue;
      if (!reach_done[d]) {
        reach[d] = metric.reach(demands[d]);
        reach_done[d] = 1;
      }
      if (reach[d] && (*reach[d])[net.index_of(stop.node)] <= cfg.radius_m + kSlack) ++valid_claims[d];
    }
  }
  for (std::size_t d = 0; d < demands.size(); ++d) {
    if (valid_claims[d] == 0) report.uncovered.push_back(demands[d].id);
    if (valid_claims[d] > 1) report.duplicated.push_back(demands[d].id);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Files: buildings `id,x_m,y_m,dwelling_units`; stops
// `stop_id,node_id,assigned_kg,service_time_s,covered_ids` with `;`-separated
// covered ids.

inline std::vector<Building> read_buildings(const std::string& path) {
  const auto t = text::Table::read_file(path);
  t.require_columns({"id", "x_m", "y_m", "dwelling_units"});
  std::vector<Building> out;
  out.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    out.push_back(Building{t.integer(r, "id"), t.number(r, "x_m"), t.number(r, "y_m"), t.integer(r, "dwelling_units")});
  }
  return out;
}

inline void write_buildings(std::span<const Building> buildings, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << "id,x_m,y_m,dwelling_units\n";
  for (const Building& b : buildings) {
    out << b.id << ',' << text::format_double(b.x_m) << ',' << text::format_double(b.y_m) << ','
        << b.dwelling_units << '\n';
  }
}

inline void write_stops(std::span<const StopPoint> stops, std::ostream& out) {
  out << "stop_id,node_id,assigned_kg,service_time_s,covered_ids\n";
  for (const StopPoint& s : stops) {
    out << s.id << ',' << s.node << ',' << text::format_double(s.assigned_demand_kg) << ','
        << text::format_double(s.service_time_s) << ',' << text::join(s.covered_demand_ids, ';') << '\n';
  }
}

inline void write_stops(std::span<const StopPoint> stops, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  write_stops(stops, out);
}

inline std::vector<StopPoint> read_stops(const std::string& path) {
  const auto t = text::Table::read_file(path);
  t.require_columns({"stop_id", "node_id", "assigned_kg", "service_time_s", "covered_ids"});
  std::vector<StopPoint> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    StopPoint s;
    s.id = t.integer(r, "stop_id");
    s.node = t.integer(r, "node_id");
    s.assigned_demand_kg = t.number(r, "assigned_kg");
    s.service_time_s = t.number(r, "service_time_s");
    const auto& ids = t.at(r, "covered_ids");
    if (!ids.empty()) {
      for (const auto& field : text::split(ids, ';')) s.covered_demand_ids.push_back(text::parse_int(field, t.where(r)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wastecollect
