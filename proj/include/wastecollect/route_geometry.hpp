#pragma once

// Map-ready trip polylines as a GeoJSON FeatureCollection. Coordinates are
// the network's projected planar meters.

#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wastecollect/coverage.hpp"
#include "wastecollect/error.hpp"
#include "wastecollect/road_network.hpp"
#include "wastecollect/vrp.hpp"

namespace wastecollect {

// Node sequence driven by one trip: the concatenated shortest paths
// depot -> stop_1 -> ... -> stop_k -> depot.
inline std::vector<NodeId> trip_vertices(const Trip& trip, std::span<const StopPoint> stops, const Depot& depot,
                                         const RoadNetwork& net, Metric metric) {
  std::unordered_map<StopId, NodeId> node_of;
  for (const StopPoint& s : stops) node_of.emplace(s.id, s.node);
  std::vector<NodeId> waypoints{depot.node};
  for (const StopId id : trip.stop_ids) {
    const auto it = node_of.find(id);
    if (it == node_of.end()) throw Error(ErrorKind::kUnknownNode, "trip references unknown stop " + std::to_string(id));
    waypoints.push_back(it->second);
  }
  waypoints.push_back(depot.node);

  std::vector<NodeId> vertices{depot.node};
  net.index_of(depot.node);
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const auto leg = shortest_path(net, waypoints[k - 1], waypoints[k], metric);
    vertices.insert(vertices.end(), leg.nodes.begin() + 1, leg.nodes.end());
  }
  return vertices;
}

inline double polyline_length(std::span<const NodeId> vertices, const RoadNetwork& net) {
  double total = 0.0;
  for (std::size_t k = 1; k < vertices.size(); ++k) {
    const Node& a = net.node(vertices[k - 1]);
    const Node& b = net.node(vertices[k]);
    total += euclidean(a.x_m, a.y_m, b.x_m, b.y_m);
  }
  return total;
}

inline nlohmann::json emit_route_geometry(const RoutePlan& plan, std::span<const StopPoint> stops, const Depot& depot,
                                          const RoadNetwork& net) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& truck : plan.trucks) {
    int index = 1;
    for (const Trip& trip : truck.trips) {
      nlohmann::json coords = nlohmann::json::array();
      for (const NodeId id : trip_vertices(trip, stops, depot, net, plan.objective)) {
        const Node& n = net.node(id);
        coords.push_back({n.x_m, n.y_m});
      }
      features.push_back({
          {"type", "Feature"},
          {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
          {"properties",
           {{"truck_id", truck.truck_id}, {"trip_index", index++}, {"load_kg", trip.load_kg},
            {"distance_m", trip.distance_m}}},
      });
    }
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline void write_route_geometry(const nlohmann::json& collection, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << collection.dump(1) << '\n';
}

}  // namespace wastecollect
