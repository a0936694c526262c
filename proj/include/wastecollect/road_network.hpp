#pragma once

// Street network as a directed weighted graph, with single-source shortest
// paths (Dijkstra), batched cost matrices, and nearest-node snapping.
//
// Node coordinates are planar meters. Edge travel time is derived from the
// length and speed. Optional turn penalties attach to pairs of consecutive
// edges and only affect the time metric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wastecollect/error.hpp"
#include "wastecollect/text_table.hpp"

namespace wastecollect {

using NodeId = std::int64_t;
using EdgeIndex = std::size_t;

enum class Metric { kTime, kDistance };

inline std::string_view to_string(Metric m) { return m == Metric::kTime ? "time" : "distance"; }

inline Metric parse_metric(std::string_view s) {
  if (s == "time") return Metric::kTime;
  if (s == "distance") return Metric::kDistance;
  throw Error(ErrorKind::kConfig, "unknown metric '" + std::string(s) + "' (expected time|distance)");
}

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_unreachable(double cost) { return std::isinf(cost); }

struct Node {
  NodeId id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double length_m = 0.0;
  double speed_kmh = 0.0;
  double travel_time_s = 0.0;

  static Edge make(NodeId from, NodeId to, double length_m, double speed_kmh) {
    if (!(length_m > 0.0) || !std::isfinite(length_m)) {
      throw Error(ErrorKind::kInvalidArgument, "edge length must be > 0");
    }
    if (!(speed_kmh > 0.0) || !std::isfinite(speed_kmh)) {
      throw Error(ErrorKind::kInvalidArgument, "edge speed must be > 0");
    }
    return Edge{from, to, length_m, speed_kmh, length_m * 3.6 / speed_kmh};
  }

  double weight(Metric m) const { return m == Metric::kTime ? travel_time_s : length_m; }
};

inline double euclidean(double x0, double y0, double x1, double y1) {
  return std::hypot(x1 - x0, y1 - y0);
}

class RoadNetwork {
 public:
  void add_node(NodeId id, double x_m, double y_m) {
    if (!std::isfinite(x_m) || !std::isfinite(y_m)) {
      throw Error(ErrorKind::kInvalidArgument, "node " + std::to_string(id) + " has non-finite coordinates");
    }
    if (index_.contains(id)) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate node id " + std::to_string(id));
    }
    index_.emplace(id, nodes_.size());
    nodes_.push_back(Node{id, x_m, y_m});
    out_.emplace_back();
    in_.emplace_back();
  }

  EdgeIndex add_edge(NodeId from, NodeId to, double length_m, double speed_kmh) {
    const auto u = index_of(from);
    const auto v = index_of(to);
    edges_.push_back(Edge::make(from, to, length_m, speed_kmh));
    const EdgeIndex e = edges_.size() - 1;
    out_[u].push_back(e);
    in_[v].push_back(e);
    return e;
  }

  // Penalty applied when a path leaves through `outgoing` right after
  // arriving through `incoming`.
  void set_turn_penalty(EdgeIndex incoming, EdgeIndex outgoing, double penalty_s) {
    if (incoming >= edges_.size() || outgoing >= edges_.size()) {
      throw Error(ErrorKind::kInvalidArgument, "turn penalty references a missing edge");
    }
    if (edges_[incoming].to != edges_[outgoing].from) {
      throw Error(ErrorKind::kInvalidArgument, "turn penalty edges " + std::to_string(incoming) + "," +
                                                   std::to_string(outgoing) + " do not share a node");
    }
    if (!(penalty_s >= 0.0) || !std::isfinite(penalty_s)) {
      throw Error(ErrorKind::kInvalidArgument, "turn penalty must be >= 0");
    }
    turn_penalty_[{incoming, outgoing}] = penalty_s;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const Node& node_at(std::size_t index) const { return nodes_[index]; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  const Node& node(NodeId id) const { return nodes_[index_of(id)]; }

  bool contains(NodeId id) const { return index_.contains(id); }

  std::size_t index_of(NodeId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::kUnknownNode, "node " + std::to_string(id) + " not in network");
    return it->second;
  }

  std::span<const EdgeIndex> out_edges(std::size_t node_index) const { return out_[node_index]; }
  std::span<const EdgeIndex> in_edges(std::size_t node_index) const { return in_[node_index]; }

  bool has_turn_penalties() const { return !turn_penalty_.empty(); }
  const std::map<std::pair<EdgeIndex, EdgeIndex>, double>& turn_penalties() const { return turn_penalty_; }

  double turn_penalty(EdgeIndex incoming, EdgeIndex outgoing) const {
    const auto it = turn_penalty_.find({incoming, outgoing});
    return it == turn_penalty_.end() ? 0.0 : it->second;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<EdgeIndex>> out_;
  std::vector<std::vector<EdgeIndex>> in_;
  std::map<std::pair<EdgeIndex, EdgeIndex>, double> turn_penalty_;
};

struct Path {
  std::vector<NodeId> nodes;
  std::vector<EdgeIndex> edges;
  double cost = 0.0;
};

namespace detail {

inline constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();

inline Metric other(Metric m) { return m == Metric::kTime ? Metric::kDistance : Metric::kTime; }

// Result of one single-source search. `cost` is the minimum under the
// search metric; `companion` is the other metric measured along the same
// path. `last_edge` is the final edge of the chosen path into each node.
struct SearchTree {
  std::size_t source = 0;
  std::vector<double> cost;
  std::vector<double> companion;
  std::vector<EdgeIndex> last_edge;
  // Edge-state predecessors, only filled for turn-aware searches.
  std::vector<EdgeIndex> edge_pred;
  bool edge_based = false;
};

// Frontier entries are ordered by (cost, node id, edge index); equal costs
// pop the smaller node id first.
using Frontier = std::tuple<double, NodeId, std::size_t, EdgeIndex>;
using MinQueue = std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>>;

inline SearchTree search_nodes(const RoadNetwork& net, std::size_t source, Metric metric,
                               std::optional<std::size_t> stop_at) {
  const auto n = net.node_count();
  SearchTree tree;
  tree.source = source;
  tree.cost.assign(n, kUnreachable);
  tree.companion.assign(n, kUnreachable);
  tree.last_edge.assign(n, kNoEdge);
  std::vector<char> settled(n, 0);
  const Metric second = other(metric);

  tree.cost[source] = 0.0;
  tree.companion[source] = 0.0;
  MinQueue queue;
  queue.emplace(0.0, net.node_at(source).id, source, kNoEdge);
  while (!queue.empty()) {
    const auto [d, id, u, via] = queue.top();
    queue.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (stop_at && *stop_at == u) break;
    for (const EdgeIndex e : net.out_edges(u)) {
      const Edge& edge = net.edge(e);
      const auto v = net.index_of(edge.to);
      if (settled[v]) continue;
      const double nd = d + edge.weight(metric);
      if (nd < tree.cost[v]) {
        tree.cost[v] = nd;
        tree.companion[v] = tree.companion[u] + edge.weight(second);
        tree.last_edge[v] = e;
        queue.emplace(nd, edge.to, v, e);
      }
    }
  }
  return tree;
}

// Turn-aware search over edge states: a state is "arrived through edge e".
inline SearchTree search_edges(const RoadNetwork& net, std::size_t source, std::optional<std::size_t> stop_at) {
  const auto n = net.node_count();
  const auto m = net.edge_count();
  SearchTree tree;
  tree.source = source;
  tree.edge_based = true;
  tree.cost.assign(n, kUnreachable);
  tree.companion.assign(n, kUnreachable);
  tree.last_edge.assign(n, kNoEdge);
  tree.edge_pred.assign(m, kNoEdge);
  std::vector<double> state_cost(m, kUnreachable);
  std::vector<double> state_length(m, kUnreachable);
  std::vector<char> state_done(m, 0);

  tree.cost[source] = 0.0;
  tree.companion[source] = 0.0;
  MinQueue queue;
  for (const EdgeIndex e : net.out_edges(source)) {
    const Edge& edge = net.edge(e);
    if (edge.travel_time_s < state_cost[e]) {
      state_cost[e] = edge.travel_time_s;
      state_length[e] = edge.length_m;
      queue.emplace(edge.travel_time_s, edge.to, net.index_of(edge.to), e);
    }
  }
  while (!queue.empty()) {
    const auto [d, id, v, e] = queue.top();
    queue.pop();
    if (state_done[e]) continue;
    state_done[e] = 1;
    if (v != source && tree.last_edge[v] == kNoEdge) {
      tree.cost[v] = d;
      tree.companion[v] = state_length[e];
      tree.last_edge[v] = e;
      if (stop_at && *stop_at == v) break;
    }
    for (const EdgeIndex f : net.out_edges(v)) {
      if (state_done[f]) continue;
      const Edge& next = net.edge(f);
      const double nd = d + net.turn_penalty(e, f) + next.travel_time_s;
      if (nd < state_cost[f]) {
        state_cost[f] = nd;
        state_length[f] = state_length[e] + next.length_m;
        tree.edge_pred[f] = e;
        queue.emplace(nd, next.to, net.index_of(next.to), f);
      }
    }
  }
  return tree;
}

inline SearchTree search(const RoadNetwork& net, std::size_t source, Metric metric,
                         std::optional<std::size_t> stop_at = std::nullopt) {
  if (metric == Metric::kTime && net.has_turn_penalties()) return search_edges(net, source, stop_at);
  return search_nodes(net, source, metric, stop_at);
}

inline Path extract_path(const RoadNetwork& net, const SearchTree& tree, std::size_t target) {
  Path path;
  path.cost = tree.cost[target];
  std::vector<EdgeIndex> edges;
  if (tree.edge_based) {
    for (EdgeIndex e = tree.last_edge[target]; e != kNoEdge; e = tree.edge_pred[e]) edges.push_back(e);
  } else {
    std::size_t v = target;
    while (v != tree.source) {
      const EdgeIndex e = tree.last_edge[v];
      edges.push_back(e);
      v = net.index_of(net.edge(e).from);
    }
  }
  std::reverse(edges.begin(), edges.end());
  path.nodes.push_back(net.node_at(tree.source).id);
  for (const EdgeIndex e : edges) path.nodes.push_back(net.edge(e).to);
  path.edges = std::move(edges);
  return path;
}

}  // namespace detail

// Minimum-cost directed path from source to target. Time costs include turn
// penalties; distance costs ignore them.
inline Path shortest_path(const RoadNetwork& net, NodeId source, NodeId target, Metric metric) {
  const auto s = net.index_of(source);
  const auto t = net.index_of(target);
  const auto tree = detail::search(net, s, metric, t);
  if (is_unreachable(tree.cost[t])) {
    throw Error(ErrorKind::kUnreachable,
                "no directed path from " + std::to_string(source) + " to " + std::to_string(target));
  }
  return detail::extract_path(net, tree, t);
}

// Dense origin x destination matrix of shortest-path costs. Unreachable
// pairs hold kUnreachable.
struct CostMatrix {
  std::vector<NodeId> origins;
  std::vector<NodeId> destinations;
  Metric metric = Metric::kTime;
  std::vector<double> values;

  std::size_t rows() const { return origins.size(); }
  std::size_t cols() const { return destinations.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * destinations.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * destinations.size() + j]; }
  bool reachable(std::size_t i, std::size_t j) const { return !is_unreachable(at(i, j)); }
};

// Both metrics for every pair, measured along the path that is optimal for
// `objective`. `time` and `distance` therefore describe the same legs.
struct TravelMatrices {
  Metric objective = Metric::kTime;
  CostMatrix time;
  CostMatrix distance;

  const CostMatrix& objective_matrix() const { return objective == Metric::kTime ? time : distance; }
  std::size_t size() const { return time.origins.size(); }
};

namespace detail {

inline unsigned resolve_workers(unsigned requested, std::size_t jobs) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs `row(i)` for every origin, spread over `workers` threads. Rows are
// independent, so the result does not depend on the worker count.
template <typename RowFn>
void for_each_origin(std::size_t count, unsigned workers, RowFn&& row) {
  workers = resolve_workers(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) row(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) row(i);
    });
  }
}

}  // namespace detail

inline CostMatrix cost_matrix(const RoadNetwork& net, std::span<const NodeId> origins,
                              std::span<const NodeId> destinations, Metric metric, unsigned workers = 0) {
  std::vector<std::size_t> src(origins.size());
  std::vector<std::size_t> dst(destinations.size());
  for (std::size_t i = 0; i < origins.size(); ++i) src[i] = net.index_of(origins[i]);
  for (std::size_t j = 0; j < destinations.size(); ++j) dst[j] = net.index_of(destinations[j]);

  CostMatrix out;
  out.origins.assign(origins.begin(), origins.end());
  out.destinations.assign(destinations.begin(), destinations.end());
  out.metric = metric;
  out.values.assign(origins.size() * destinations.size(), kUnreachable);
  detail::for_each_origin(origins.size(), workers, [&](std::size_t i) {
    const auto tree = detail::search(net, src[i], metric);
    for (std::size_t j = 0; j < dst.size(); ++j) out.at(i, j) = tree.cost[dst[j]];
  });
  return out;
}

inline TravelMatrices travel_matrices(const RoadNetwork& net, std::span<const NodeId> nodes, Metric objective,
                                      unsigned workers = 0) {
  std::vector<std::size_t> idx(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) idx[i] = net.index_of(nodes[i]);

  TravelMatrices out;
  out.objective = objective;
  for (CostMatrix* m : {&out.time, &out.distance}) {
    m->origins.assign(nodes.begin(), nodes.end());
    m->destinations.assign(nodes.begin(), nodes.end());
    m->values.assign(nodes.size() * nodes.size(), kUnreachable);
  }
  out.time.metric = Metric::kTime;
  out.distance.metric = Metric::kDistance;
  CostMatrix& primary = objective == Metric::kTime ? out.time : out.distance;
  CostMatrix& secondary = objective == Metric::kTime ? out.distance : out.time;
  detail::for_each_origin(nodes.size(), workers, [&](std::size_t i) {
    const auto tree = detail::search(net, idx[i], objective);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      primary.at(i, j) = tree.cost[idx[j]];
      secondary.at(i, j) = tree.companion[idx[j]];
    }
  });
  return out;
}

// Nearest node by Euclidean distance; ties within 1e-9 m go to the smaller id.
inline NodeId snap(const RoadNetwork& net, double x_m, double y_m, double max_dist_m) {
  if (net.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot snap to an empty network");
  if (!(max_dist_m > 0.0)) throw Error(ErrorKind::kInvalidArgument, "snap distance must be > 0");
  constexpr double kTie = 1e-9;
  const Node* best = nullptr;
  double best_d = kUnreachable;
  for (const Node& n : net.nodes()) {
    const double d = euclidean(x_m, y_m, n.x_m, n.y_m);
    if (best == nullptr || d < best_d - kTie || (std::abs(d - best_d) <= kTie && n.id < best->id)) {
      best = &n;
      best_d = std::min(best_d, d);
    }
  }
  if (best_d > max_dist_m) {
    throw Error(ErrorKind::kNoNodeWithinRange, "nearest node " + std::to_string(best->id) + " is " +
                                                   text::format_fixed(best_d, 1) + " m away (limit " +
                                                   text::format_fixed(max_dist_m, 1) + " m)");
  }
  return best->id;
}

// Street distances from `source` treating every edge as walkable in both
// directions, truncated at `limit_m` (farther nodes stay kUnreachable).
inline std::vector<double> walking_distances(const RoadNetwork& net, std::size_t source, double limit_m) {
  const auto n = net.node_count();
  std::vector<double> dist(n, kUnreachable);
  std::vector<char> settled(n, 0);
  using Item = std::tuple<double, NodeId, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, net.node_at(source).id, source);
  auto relax = [&](std::size_t v, double nd) {
    if (!settled[v] && nd <= limit_m && nd < dist[v]) {
      dist[v] = nd;
      queue.emplace(nd, net.node_at(v).id, v);
    }
  };
  while (!queue.empty()) {
    const auto [d, id, u] = queue.top();
    queue.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (const EdgeIndex e : net.out_edges(u)) relax(net.index_of(net.edge(e).to), d + net.edge(e).length_m);
    for (const EdgeIndex e : net.in_edges(u)) relax(net.index_of(net.edge(e).from), d + net.edge(e).length_m);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Files: node table `id,x_m,y_m`, edge table `from_id,to_id,length_m,speed_kmh`
// and optional turn table `from_edge_index,to_edge_index,penalty_s`. Edge
// indices are zero-based row positions in the edge table.

inline RoadNetwork read_network(const std::string& nodes_path, const std::string& edges_path,
                                const std::string& turns_path = {}, double default_speed_kmh = 40.0) {
  RoadNetwork net;
  const auto nodes = text::Table::read_file(nodes_path);
  nodes.require_columns({"id", "x_m", "y_m"});
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    net.add_node(nodes.integer(r, "id"), nodes.number(r, "x_m"), nodes.number(r, "y_m"));
  }
  const auto edges = text::Table::read_file(edges_path);
  edges.require_columns({"from_id", "to_id", "length_m", "speed_kmh"});
  for (std::size_t r = 0; r < edges.size(); ++r) {
    // An empty speed cell falls back to the fleet's average speed.
    const double speed =
        edges.at(r, "speed_kmh").empty() ? default_speed_kmh : edges.number(r, "speed_kmh");
    try {
      net.add_edge(edges.integer(r, "from_id"), edges.integer(r, "to_id"), edges.number(r, "length_m"), speed);
    } catch (const Error& e) {
      throw Error(e.kind(), edges.where(r) + ": " + e.what());
    }
  }
  if (!turns_path.empty()) {
    const auto turns = text::Table::read_file(turns_path);
    turns.require_columns({"from_edge_index", "to_edge_index", "penalty_s"});
    for (std::size_t r = 0; r < turns.size(); ++r) {
      const auto in = turns.integer(r, "from_edge_index");
      const auto out = turns.integer(r, "to_edge_index");
      if (in < 0 || out < 0) throw Error(ErrorKind::kParse, turns.where(r) + ": negative edge index");
      try {
        net.set_turn_penalty(static_cast<EdgeIndex>(in), static_cast<EdgeIndex>(out), turns.number(r, "penalty_s"));
      } catch (const Error& e) {
        throw Error(e.kind(), turns.where(r) + ": " + e.what());
      }
    }
  }
  return net;
}

inline void write_network(const RoadNetwork& net, const std::string& nodes_path, const std::string& edges_path) {
  std::ofstream nodes(nodes_path);
  if (!nodes) throw Error(ErrorKind::kIo, "cannot write " + nodes_path);
  nodes << "id,x_m,y_m\n";
  for (const Node& n : net.nodes()) {
    nodes << n.id << ',' << text::format_double(n.x_m) << ',' << text::format_double(n.y_m) << '\n';
  }
  std::ofstream edges(edges_path);
  if (!edges) throw Error(ErrorKind::kIo, "cannot write " + edges_path);
  edges << "from_id,to_id,length_m,speed_kmh\n";
  for (const Edge& e : net.edges()) {
    edges << e.from << ',' << e.to << ',' << text::format_double(e.length_m) << ','
          << text::format_double(e.speed_kmh) << '\n';
  }
}

}  // namespace wastecollect
