#pragma once

// Capacitated multi-trip routing over the stop set.
//
// Trips are built first (Clarke-Wright savings, then 2-opt and Or-opt local
// search with seeded restarts) and packed onto trucks afterwards with
// first-fit-decreasing against the working shift. The objective is total
// driving cost under the chosen metric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wastecollect/coverage.hpp"
#include "wastecollect/error.hpp"
#include "wastecollect/road_network.hpp"
#include "wastecollect/text_table.hpp"

namespace wastecollect {

struct FleetSpec {
  double capacity_kg = 4000.0;
  // Only used for edges without a recorded speed.
  double speed_kmh = 40.0;
  double stop_service_s = 1800.0;
  double unload_s = 900.0;
  double shift_s = 8.0 * 3600.0;
  int crew_size = 3;

  void validate() const {
    if (!(capacity_kg > 0.0) || !(speed_kmh > 0.0) || !(stop_service_s > 0.0) || !(unload_s > 0.0) ||
        !(shift_s > 0.0) || crew_size <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "fleet parameters must all be positive");
    }
  }
};

struct Depot {
  NodeId node = 0;
};

struct Trip {
  std::vector<StopId> stop_ids;
  double load_kg = 0.0;
  double drive_time_s = 0.0;
  double service_time_s = 0.0;
  double unload_s = 0.0;
  double total_time_s = 0.0;
  double distance_m = 0.0;

  double cost(Metric objective) const { return objective == Metric::kTime ? drive_time_s : distance_m; }
};

struct TruckSchedule {
  int truck_id = 0;
  std::vector<Trip> trips;

  double total_time_s() const {
    double t = 0.0;
    for (const Trip& trip : trips) t += trip.total_time_s;
    return t;
  }
};

struct RoutePlan {
  std::vector<TruckSchedule> trucks;
  std::size_t fleet_size = 0;
  std::size_t trip_count = 0;
  double total_distance_m = 0.0;
  double total_drive_time_s = 0.0;
  double total_work_time_s = 0.0;
  Metric objective = Metric::kTime;

  double cost() const { return objective == Metric::kTime ? total_drive_time_s : total_distance_m; }

  std::vector<Trip> all_trips() const {
    std::vector<Trip> out;
    for (const auto& truck : trucks) out.insert(out.end(), truck.trips.begin(), truck.trips.end());
    return out;
  }
};

struct SolverOptions {
  // Restart 0 is the plain savings construction; later restarts perturb the
  // savings with seeded noise.
  int restarts = 16;
  double savings_noise = 0.25;
  std::size_t move_budget = 200000;
};

inline constexpr std::size_t kBruteForceMaxStops = 8;

// Travel data for the depot (index 0) and stops (index 1..n) in matrix order.
class VrpInstance {
 public:
  VrpInstance(const TravelMatrices& matrices, std::span<const StopPoint> stops, const Depot& depot,
              const FleetSpec& fleet, Metric objective)
      : matrices_(matrices), fleet_(fleet), objective_(objective) {
    fleet.validate();
    const std::size_t n = stops.size();
    if (matrices.size() != n + 1 || matrices.time.cols() != n + 1 || matrices.distance.rows() != n + 1) {
      throw Error(ErrorKind::kInvalidArgument, "travel matrices must cover the depot followed by every stop");
    }
    if (matrices.time.origins[0] != depot.node) {
      throw Error(ErrorKind::kInvalidArgument, "travel matrix row 0 must be the depot node");
    }
    ids_.push_back(0);
    demand_.push_back(0.0);
    service_.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const StopPoint& s = stops[i];
      if (matrices.time.origins[i + 1] != s.node) {
        throw Error(ErrorKind::kInvalidArgument, "travel matrix row " + std::to_string(i + 1) +
                                                     " does not match stop " + std::to_string(s.id));
      }
      if (s.assigned_demand_kg > fleet.capacity_kg) {
        throw Error(ErrorKind::kInfeasibleStop, "stop " + std::to_string(s.id) + " demand " +
                                                    text::format_double(s.assigned_demand_kg) +
                                                    " kg exceeds truck capacity");
      }
      if (!matrices.time.reachable(0, i + 1) || !matrices.time.reachable(i + 1, 0) ||
          !matrices.distance.reachable(0, i + 1) || !matrices.distance.reachable(i + 1, 0)) {
        throw Error(ErrorKind::kUnreachableStop, "stop " + std::to_string(s.id) + " at node " +
                                                     std::to_string(s.node) + " is not connected to the depot");
      }
      ids_.push_back(s.id);
      demand_.push_back(s.assigned_demand_kg);
      service_.push_back(s.service_time_s > 0.0 ? s.service_time_s : fleet.stop_service_s);
    }
    for (std::size_t i = 1; i <= n; ++i) {
      const std::vector<int> single{static_cast<int>(i)};
      if (trip_time(single) > fleet.shift_s) {
        throw Error(ErrorKind::kShiftTooShort, "serving stop " + std::to_string(ids_[i]) +
                                                   " alone takes longer than the shift");
      }
    }
  }

  std::size_t stop_count() const { return ids_.size() - 1; }
  StopId stop_id(int i) const { return ids_[i]; }
  double demand(int i) const { return demand_[i]; }
  const FleetSpec& fleet() const { return fleet_; }
  Metric objective() const { return objective_; }

  double cost(int a, int b) const { return objective_ == Metric::kTime ? time(a, b) : distance(a, b); }
  double time(int a, int b) const { return matrices_.time.at(a, b); }
  double distance(int a, int b) const { return matrices_.distance.at(a, b); }

  // Stop positions (1..n) in visiting order; the depot is implicit at both ends.
  using Route = std::vector<int>;

  template <typename Leg>
  double sum_legs(const Route& r, Leg&& leg) const {
    if (r.empty()) return 0.0;
    double total = leg(0, r.front());
    for (std::size_t k = 1; k < r.size(); ++k) total += leg(r[k - 1], r[k]);
    return total + leg(r.back(), 0);
  }

  double route_cost(const Route& r) const {
    return sum_legs(r, [this](int a, int b) { return cost(a, b); });
  }

  double load(const Route& r) const {
    double total = 0.0;
    for (const int i : r) total += demand_[i];
    return total;
  }

  double trip_time(const Route& r) const {
    double service = 0.0;
    for (const int i : r) service += service_[i];
    return sum_legs(r, [this](int a, int b) { return time(a, b); }) + service + fleet_.unload_s;
  }

  bool fits_capacity(double load) const { return load <= fleet_.capacity_kg + 1e-9; }
  bool feasible(const Route& r) const { return fits_capacity(load(r)) && trip_time(r) <= fleet_.shift_s; }

  Trip make_trip(const Route& r) const {
    Trip t;
    for (const int i : r) {
      t.stop_ids.push_back(ids_[i]);
      t.load_kg += demand_[i];
      t.service_time_s += service_[i];
    }
    t.drive_time_s = sum_legs(r, [this](int a, int b) { return time(a, b); });
    t.distance_m = sum_legs(r, [this](int a, int b) { return distance(a, b); });
    t.unload_s = fleet_.unload_s;
    t.total_time_s = t.drive_time_s + t.service_time_s + t.unload_s;
    return t;
  }

  Route route_of(const Trip& t) const {
    Route r;
    for (const StopId id : t.stop_ids) {
      const auto it = std::find(ids_.begin() + 1, ids_.end(), id);
      if (it == ids_.end()) throw Error(ErrorKind::kInvalidArgument, "trip references unknown stop " + std::to_string(id));
      r.push_back(static_cast<int>(it - ids_.begin()));
    }
    return r;
  }

 private:
  const TravelMatrices& matrices_;
  FleetSpec fleet_;
  Metric objective_;
  std::vector<StopId> ids_;
  std::vector<double> demand_;
  std::vector<double> service_;
};

using Routes = std::vector<VrpInstance::Route>;

// Assignment of trips (by index) to trucks.
struct FleetAssignment {
  std::vector<std::vector<std::size_t>> trucks;
  std::size_t fleet_size() const { return trucks.size(); }
};

// First-fit-decreasing packing of trip durations into shift-length bins.
inline FleetAssignment size_fleet(std::span<const Trip> trips, double shift_s) {
  std::vector<std::size_t> order(trips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const std::size_t i : order) {
    if (trips[i].total_time_s > shift_s) {
      throw Error(ErrorKind::kShiftTooShort, "trip " + std::to_string(i) + " lasts " +
                                                 text::format_double(trips[i].total_time_s) +
                                                 " s, longer than the shift");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trips[a].total_time_s > trips[b].total_time_s; });
  FleetAssignment out;
  std::vector<double> used;
  for (const std::size_t i : order) {
    std::size_t bin = 0;
    while (bin < used.size() && used[bin] + trips[i].total_time_s > shift_s) ++bin;
    if (bin == used.size()) {
      used.push_back(0.0);
      out.trucks.emplace_back();
    }
    used[bin] += trips[i].total_time_s;
    out.trucks[bin].push_back(i);
  }
  for (auto& truck : out.trucks) std::sort(truck.begin(), truck.end());
  return out;
}

inline RoutePlan make_plan(std::span<const Trip> trips, const FleetSpec& fleet, Metric objective) {
  const auto assignment = size_fleet(trips, fleet.shift_s);
  RoutePlan plan;
  plan.objective = objective;
  int truck_id = 1;
  for (const auto& indices : assignment.trucks) {
    TruckSchedule truck;
    truck.truck_id = truck_id++;
    for (const std::size_t i : indices) truck.trips.push_back(trips[i]);
    plan.trucks.push_back(std::move(truck));
  }
  plan.fleet_size = plan.trucks.size();
  plan.trip_count = trips.size();
  for (const auto& truck : plan.trucks) {
    for (const Trip& t : truck.trips) {
      plan.total_distance_m += t.distance_m;
      plan.total_drive_time_s += t.drive_time_s;
      plan.total_work_time_s += t.total_time_s;
    }
  }
  return plan;
}

namespace detail {

inline double routes_cost(const VrpInstance& inst, const Routes& routes) {
  double total = 0.0;
  for (const auto& r : routes) total += inst.route_cost(r);
  return total;
}

inline std::vector<Trip> to_trips(const VrpInstance& inst, const Routes& routes) {
  std::vector<Trip> trips;
  for (const auto& r : routes) {
    if (!r.empty()) trips.push_back(inst.make_trip(r));
  }
  return trips;
}

// Parallel savings construction. `weight` scales each saving before
// sorting; the plain construction uses weight 1 everywhere.
template <typename Weight>
Routes savings_routes(const VrpInstance& inst, Weight&& weight) {
  const int n = static_cast<int>(inst.stop_count());
  struct Saving {
    double value;
    int i;
    int j;
  };
  std::vector<Saving> savings;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j || is_unreachable(inst.cost(i, j))) continue;
      const double s = inst.cost(i, 0) + inst.cost(0, j) - inst.cost(i, j);
      savings.push_back({s * weight(i, j), i, j});
    }
  }
  std::stable_sort(savings.begin(), savings.end(), [&](const Saving& a, const Saving& b) {
    if (a.value != b.value) return a.value > b.value;
    if (inst.stop_id(a.i) != inst.stop_id(b.i)) return inst.stop_id(a.i) < inst.stop_id(b.i);
    return inst.stop_id(a.j) < inst.stop_id(b.j);
  });

  Routes routes(n + 1);
  std::vector<int> owner(n + 1);
  for (int i = 1; i <= n; ++i) {
    routes[i] = {i};
    owner[i] = i;
  }
  for (const Saving& s : savings) {
    if (s.value < 0.0) break;
    const int ri = owner[s.i];
    const int rj = owner[s.j];
    if (ri == rj || routes[ri].back() != s.i || routes[rj].front() != s.j) continue;
    VrpInstance::Route merged = routes[ri];
    merged.insert(merged.end(), routes[rj].begin(), routes[rj].end());
    if (!inst.feasible(merged)) continue;
    for (const int k : routes[rj]) owner[k] = ri;
    routes[ri] = std::move(merged);
    routes[rj].clear();
  }
  Routes out;
  for (auto& r : routes) {
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

// First-improvement descent over intra-trip 2-opt and Or-opt relocation of
// one or two consecutive stops (within or across trips). Returns the number
// of applied moves.
inline std::size_t descend(const VrpInstance& inst, Routes& routes, std::size_t move_budget) {
  std::size_t moves = 0;
  const double scale = std::max(1.0, routes_cost(inst, routes));
  const double eps = 1e-9 * scale;
  bool improved = true;
  while (improved && moves < move_budget) {
    improved = false;

    // 2-opt: reverse a segment inside one trip.
    for (auto& r : routes) {
      const double base = inst.route_cost(r);
      for (std::size_t i = 0; i + 1 < r.size() && !improved; ++i) {
        for (std::size_t j = i + 1; j < r.size(); ++j) {
          VrpInstance::Route cand = r;
          std::reverse(cand.begin() + static_cast<std::ptrdiff_t>(i), cand.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          const double c = inst.route_cost(cand);
          if (c < base - eps && inst.trip_time(cand) <= inst.fleet().shift_s) {
            r = std::move(cand);
            improved = true;
            break;
          }
        }
      }
      if (improved) break;
    }
    if (improved) {
      ++moves;
      continue;
    }

    // Or-opt: move a run of 1-2 stops to another position.
    for (std::size_t a = 0; a < routes.size() && !improved; ++a) {
      for (std::size_t len = 1; len <= 2 && !improved; ++len) {
        for (std::size_t s = 0; s + len <= routes[a].size() && !improved; ++s) {
          VrpInstance::Route source = routes[a];
          const VrpInstance::Route segment(source.begin() + static_cast<std::ptrdiff_t>(s),
                                           source.begin() + static_cast<std::ptrdiff_t>(s + len));
          source.erase(source.begin() + static_cast<std::ptrdiff_t>(s), source.begin() + static_cast<std::ptrdiff_t>(s + len));
          const double old_a = inst.route_cost(routes[a]);
          for (std::size_t b = 0; b < routes.size() && !improved; ++b) {
            const VrpInstance::Route& host = (a == b) ? source : routes[b];
            if (a != b && !inst.fits_capacity(inst.load(host) + inst.load(segment))) continue;
            const double old_b = (a == b) ? 0.0 : inst.route_cost(routes[b]);
            const double new_a = (a == b) ? 0.0 : inst.route_cost(source);
            for (std::size_t p = 0; p <= host.size(); ++p) {
              if (a == b && p == s) continue;
              VrpInstance::Route cand = host;
              cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(p), segment.begin(), segment.end());
              const double delta = inst.route_cost(cand) + new_a - old_a - old_b;
              if (delta >= -eps) continue;
              if (inst.trip_time(cand) > inst.fleet().shift_s) continue;
              if (a != b && !source.empty() && inst.trip_time(source) > inst.fleet().shift_s) continue;
              if (a == b) {
                routes[a] = std::move(cand);
              } else {
                routes[b] = std::move(cand);
                routes[a] = source;
              }
              improved = true;
              break;
            }
          }
        }
      }
    }
    if (improved) {
      ++moves;
      routes.erase(std::remove_if(routes.begin(), routes.end(), [](const auto& r) { return r.empty(); }),
                   routes.end());
    }
  }
  return moves;
}

// SplitMix64 finaliser; derives per-restart seeds from the user seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

inline std::vector<Trip> clarke_wright(const TravelMatrices& matrices, std::span<const StopPoint> stops,
                                       const Depot& depot, const FleetSpec& fleet, Metric objective) {
  const VrpInstance inst(matrices, stops, depot, fleet, objective);
  return detail::to_trips(inst, detail::savings_routes(inst, [](int, int) { return 1.0; }));
}

// Local search on the trips of `plan`; the result is re-packed onto trucks.
inline RoutePlan improve_local(const RoutePlan& plan, const TravelMatrices& matrices,
                               std::span<const StopPoint> stops, const Depot& depot, const FleetSpec& fleet,
                               Metric objective, std::size_t move_budget = SolverOptions{}.move_budget) {
  const VrpInstance inst(matrices, stops, depot, fleet, objective);
  Routes routes;
  for (const Trip& t : plan.all_trips()) routes.push_back(inst.route_of(t));
  detail::descend(inst, routes, move_budget);
  return make_plan(detail::to_trips(inst, routes), fleet, objective);
}

inline RoutePlan solve_vrp(const TravelMatrices& matrices, std::span<const StopPoint> stops, const Depot& depot,
                           const FleetSpec& fleet, Metric objective, std::uint64_t seed,
                           const SolverOptions& options = {}) {
  const VrpInstance inst(matrices, stops, depot, fleet, objective);
  if (stops.empty()) return make_plan({}, fleet, objective);

  Routes best;
  double best_cost = kUnreachable;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Routes routes;
    if (r == 0) {
      routes = detail::savings_routes(inst, [](int, int) { return 1.0; });
    } else {
      std::mt19937_64 rng(detail::mix_seed(seed + static_cast<std::uint64_t>(r)));
      const int n = static_cast<int>(inst.stop_count());
      std::vector<double> noise(static_cast<std::size_t>((n + 1) * (n + 1)));
      for (auto& v : noise) v = 1.0 + options.savings_noise * (2.0 * detail::unit_uniform(rng) - 1.0);
      routes = detail::savings_routes(inst, [&](int i, int j) { return noise[i * (n + 1) + j]; });
    }
    detail::descend(inst, routes, options.move_budget);
    const double c = detail::routes_cost(inst, routes);
    // Earlier restarts win ties, so the pick is reproducible.
    if (c < best_cost - 1e-9 * std::max(1.0, best_cost == kUnreachable ? 1.0 : best_cost)) {
      best = std::move(routes);
      best_cost = c;
    }
  }
  return make_plan(detail::to_trips(inst, best), fleet, objective);
}

// Exact optimum by enumerating every capacity- and shift-feasible trip with
// every visiting order, then the best partition of stops into such trips.
inline RoutePlan brute_force_vrp(const TravelMatrices& matrices, std::span<const StopPoint> stops,
                                 const Depot& depot, const FleetSpec& fleet, Metric objective) {
  if (stops.size() > kBruteForceMaxStops) {
    throw Error(ErrorKind::kTooLarge, "exhaustive search supports at most " +
                                          std::to_string(kBruteForceMaxStops) + " stops");
  }
  const VrpInstance inst(matrices, stops, depot, fleet, objective);
  const int n = static_cast<int>(stops.size());
  const std::size_t full = (std::size_t{1} << n) - 1;

  std::vector<double> trip_cost(full + 1, kUnreachable);
  std::vector<VrpInstance::Route> trip_order(full + 1);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    VrpInstance::Route r;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) r.push_back(i + 1);
    }
    if (!inst.fits_capacity(inst.load(r))) continue;
    do {
      const double c = inst.route_cost(r);
      if (c < trip_cost[mask] && inst.trip_time(r) <= fleet.shift_s) {
        trip_cost[mask] = c;
        trip_order[mask] = r;
      }
    } while (std::next_permutation(r.begin(), r.end()));
  }

  std::vector<double> best(full + 1, kUnreachable);
  std::vector<std::size_t> choice(full + 1, 0);
  best[0] = 0.0;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    const std::size_t low = mask & (~mask + 1);
    for (std::size_t sub = mask; sub; sub = (sub - 1) & mask) {
      if (!(sub & low) || is_unreachable(trip_cost[sub]) || is_unreachable(best[mask ^ sub])) continue;
      const double c = best[mask ^ sub] + trip_cost[sub];
      if (c < best[mask]) {
        best[mask] = c;
        choice[mask] = sub;
      }
    }
  }
  Routes routes;
  for (std::size_t mask = full; mask; mask ^= choice[mask]) routes.push_back(trip_order[choice[mask]]);
  std::reverse(routes.begin(), routes.end());
  return make_plan(detail::to_trips(inst, routes), fleet, objective);
}

struct TruckMetrics {
  int truck_id = 0;
  std::size_t trips = 0;
  std::size_t stop_visits = 0;
  double distance_m = 0.0;
  double drive_s = 0.0;
  double service_s = 0.0;
  double unload_s = 0.0;
  double total_s = 0.0;
};

struct RouteMetrics {
  std::vector<TruckMetrics> per_truck;
  std::size_t fleet_size = 0;
  std::size_t trip_count = 0;
  std::size_t stop_visits = 0;
  double total_distance_m = 0.0;
  double total_drive_s = 0.0;
  double total_service_s = 0.0;
  double total_unload_s = 0.0;
  double total_time_s = 0.0;
  // Per truck (route = one truck's working day); zero for an empty plan.
  double avg_route_distance_m = 0.0;
  double avg_route_time_s = 0.0;
  // Per trip.
  double avg_trip_distance_m = 0.0;
  double avg_trip_time_s = 0.0;
};

inline RouteMetrics route_metrics(const RoutePlan& plan) {
  RouteMetrics m;
  for (const auto& truck : plan.trucks) {
    TruckMetrics t;
    t.truck_id = truck.truck_id;
    for (const Trip& trip : truck.trips) {
      ++t.trips;
      t.stop_visits += trip.stop_ids.size();
      t.distance_m += trip.distance_m;
      t.drive_s += trip.drive_time_s;
      t.service_s += trip.service_time_s;
      t.unload_s += trip.unload_s;
    }
    t.total_s = t.drive_s + t.service_s + t.unload_s;
    m.trip_count += t.trips;
    m.stop_visits += t.stop_visits;
    m.total_distance_m += t.distance_m;
    m.total_drive_s += t.drive_s;
    m.total_service_s += t.service_s;
    m.total_unload_s += t.unload_s;
    m.per_truck.push_back(t);
  }
  m.total_time_s = m.total_drive_s + m.total_service_s + m.total_unload_s;
  m.fleet_size = m.per_truck.size();
  if (m.fleet_size > 0) {
    m.avg_route_distance_m = m.total_distance_m / static_cast<double>(m.fleet_size);
    m.avg_route_time_s = m.total_time_s / static_cast<double>(m.fleet_size);
  }
  if (m.trip_count > 0) {
    m.avg_trip_distance_m = m.total_distance_m / static_cast<double>(m.trip_count);
    m.avg_trip_time_s = m.total_time_s / static_cast<double>(m.trip_count);
  }
  return m;
}

// Structural audit: every stop in exactly one trip, loads and shift respected,
// totals consistent. Returns an empty string when the plan is valid.
inline std::string check_plan(const RoutePlan& plan, std::span<const StopPoint> stops, const FleetSpec& fleet) {
  std::vector<int> seen(stops.size(), 0);
  auto position = [&](StopId id) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < stops.size(); ++i) {
      if (stops[i].id == id) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  std::size_t busy_trucks = 0;
  for (const auto& truck : plan.trucks) {
    if (!truck.trips.empty()) ++busy_trucks;
    if (truck.total_time_s() > fleet.shift_s) return "truck " + std::to_string(truck.truck_id) + " exceeds the shift";
    for (const Trip& t : truck.trips) {
      if (t.stop_ids.empty()) return "empty trip";
      if (t.load_kg > fleet.capacity_kg + 1e-9) return "trip load exceeds capacity";
      double load = 0.0;
      for (const StopId id : t.stop_ids) {
        const auto p = position(id);
        if (p < 0) return "unknown stop " + std::to_string(id);
        ++seen[static_cast<std::size_t>(p)];
        load += stops[static_cast<std::size_t>(p)].assigned_demand_kg;
      }
      if (std::abs(load - t.load_kg) > 1e-9 * std::max(1.0, load)) return "trip load does not match its stops";
      if (t.total_time_s != t.drive_time_s + t.service_time_s + t.unload_s) return "trip time does not decompose";
    }
  }
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (seen[i] != 1) return "stop " + std::to_string(stops[i].id) + " visited " + std::to_string(seen[i]) + " times";
  }
  if (busy_trucks != plan.fleet_size) return "fleet size does not match trucks in use";
  return {};
}

// ---------------------------------------------------------------------------
// Plan file: `truck_id,trip_index,stop_sequence,load_kg,distance_m,drive_s,service_s,unload_s`
// with `;`-separated stop ids; trip_index counts from 1 within each truck.

inline void write_plan(const RoutePlan& plan, std::ostream& out) {
  out << "truck_id,trip_index,stop_sequence,load_kg,distance_m,drive_s,service_s,unload_s\n";
  for (const auto& truck : plan.trucks) {
    int index = 1;
    for (const Trip& t : truck.trips) {
      out << truck.truck_id << ',' << index++ << ',' << text::join(t.stop_ids, ';') << ','
          << text::format_double(t.load_kg) << ',' << text::format_double(t.distance_m) << ','
          << text::format_double(t.drive_time_s) << ',' << text::format_double(t.service_time_s) << ','
          << text::format_double(t.unload_s) << '\n';
    }
  }
}

inline void write_plan(const RoutePlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  write_plan(plan, out);
}

inline RoutePlan read_plan(const std::string& path, Metric objective = Metric::kTime) {
  const auto t = text::Table::read_file(path);
  t.require_columns({"truck_id", "trip_index", "stop_sequence", "load_kg", "distance_m", "drive_s", "service_s", "unload_s"});
  RoutePlan plan;
  plan.objective = objective;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const int truck_id = static_cast<int>(t.integer(r, "truck_id"));
    if (plan.trucks.empty() || plan.trucks.back().truck_id != truck_id) plan.trucks.push_back(TruckSchedule{truck_id, {}});
    Trip trip;
    for (const auto& f : text::split(t.at(r, "stop_sequence"), ';')) trip.stop_ids.push_back(text::parse_int(f, t.where(r)));
    trip.load_kg = t.number(r, "load_kg");
    trip.distance_m = t.number(r, "distance_m");
    trip.drive_time_s = t.number(r, "drive_s");
    trip.service_time_s = t.number(r, "service_s");
    trip.unload_s = t.number(r, "unload_s");
    trip.total_time_s = trip.drive_time_s + trip.service_time_s + trip.unload_s;
    plan.total_distance_m += trip.distance_m;
    plan.total_drive_time_s += trip.drive_time_s;
    plan.total_work_time_s += trip.total_time_s;
    ++plan.trip_count;
    plan.trucks.back().trips.push_back(std::move(trip));
  }
  plan.fleet_size = plan.trucks.size();
  return plan;
}

}  // namespace wastecollect
