#pragma once

// Seeded grid cities for demos and property tests: a rectangular street grid
// with two-way streets, buildings scattered inside each block, and an
// optional access road to a disposal facility south of the grid.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wastecollect/coverage.hpp"
#include "wastecollect/error.hpp"
#include "wastecollect/key_values.hpp"
#include "wastecollect/road_network.hpp"

namespace wastecollect {

struct SyntheticCitySpec {
  std::uint64_t seed = 1;
  int cols = 3;  // blocks along x
  int rows = 3;  // blocks along y
  double block_m = 200.0;
  int buildings_per_block = 0;
  int units_per_building = 8;
  double speed_kmh = 40.0;
  // Length of the road from the grid's south-west corner to the facility;
  // 0 means no facility node.
  double depot_link_m = 0.0;

  void validate() const {
    if (cols <= 0 || rows <= 0) throw Error(ErrorKind::kConfig, "grid dimensions must be positive");
    if (!(block_m > 0.0)) throw Error(ErrorKind::kConfig, "block length must be > 0");
    if (buildings_per_block < 0 || units_per_building < 0) {
      throw Error(ErrorKind::kConfig, "building density and units must be >= 0");
    }
    if (!(speed_kmh > 0.0)) throw Error(ErrorKind::kConfig, "speed must be > 0");
    if (!(depot_link_m >= 0.0)) throw Error(ErrorKind::kConfig, "depot link length must be >= 0");
  }

  static SyntheticCitySpec from(const KeyValues& kv) {
    SyntheticCitySpec s;
    s.seed = static_cast<std::uint64_t>(kv.integer("seed", 1));
    s.cols = static_cast<int>(kv.integer("grid.cols", s.cols));
    s.rows = static_cast<int>(kv.integer("grid.rows", s.rows));
    s.block_m = kv.number("block_m", s.block_m);
    s.buildings_per_block = static_cast<int>(kv.integer("buildings_per_block", s.buildings_per_block));
    s.units_per_building = static_cast<int>(kv.integer("units_per_building", s.units_per_building));
    s.speed_kmh = kv.number("speed_kmh", s.speed_kmh);
    s.depot_link_m = kv.number("depot_link_m", s.depot_link_m);
    s.validate();
    return s;
  }
};

struct SyntheticCity {
  RoadNetwork network;
  std::vector<Building> buildings;
  std::optional<NodeId> facility_node;
};

inline NodeId grid_node_id(const SyntheticCitySpec& spec, int col, int row) {
  return static_cast<NodeId>(row) * (spec.cols + 1) + col + 1;
}

inline SyntheticCity gen_synthetic_city(const SyntheticCitySpec& spec) {
  spec.validate();
  SyntheticCity city;
  auto& net = city.network;
  for (int r = 0; r <= spec.rows; ++r) {
    for (int c = 0; c <= spec.cols; ++c) net.add_node(grid_node_id(spec, c, r), c * spec.block_m, r * spec.block_m);
  }
  auto two_way = [&](NodeId a, NodeId b, double length) {
    net.add_edge(a, b, length, spec.speed_kmh);
    net.add_edge(b, a, length, spec.speed_kmh);
  };
  for (int r = 0; r <= spec.rows; ++r) {
    for (int c = 0; c <= spec.cols; ++c) {
      if (c < spec.cols) two_way(grid_node_id(spec, c, r), grid_node_id(spec, c + 1, r), spec.block_m);
      if (r < spec.rows) two_way(grid_node_id(spec, c, r), grid_node_id(spec, c, r + 1), spec.block_m);
    }
  }
  if (spec.depot_link_m > 0.0) {
    const NodeId facility = grid_node_id(spec, spec.cols, spec.rows) + 1;
    net.add_node(facility, 0.0, -spec.depot_link_m);
    two_way(grid_node_id(spec, 0, 0), facility, spec.depot_link_m);
    city.facility_node = facility;
  }

  // Buildings keep a 10% setback from the streets around their block.
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double margin = 0.1 * spec.block_m;
  const double span = spec.block_m - 2.0 * margin;
  DemandId next_id = 1;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      for (int k = 0; k < spec.buildings_per_block; ++k) {
        const double x = c * spec.block_m + margin + uniform() * span;
        const double y = r * spec.block_m + margin + uniform() * span;
        city.buildings.push_back(Building{next_id++, x, y, spec.units_per_building});
      }
    }
  }
  return city;
}

struct SyntheticCityFiles {
  std::string nodes;
  std::string edges;
  std::string buildings;
};

inline SyntheticCityFiles write_synthetic_city(const SyntheticCity& city, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  SyntheticCityFiles files{(base / "nodes.csv").string(), (base / "edges.csv").string(),
                           (base / "buildings.csv").string()};
  write_network(city.network, files.nodes, files.edges);
  write_buildings(city.buildings, files.buildings);
  return files;
}

}  // namespace wastecollect
