// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "published_scenarios.hpp"
#include "wastecollect/wastecollect.hpp"

namespace wc = wastecollect;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(WASTECOLLECT_SOURCE_DIR) / "data";

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fixed(double v, int digits) { return wc::text::format_fixed(v, digits); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. Published percent-improvement column.
Outcome comparison_reproduction() {
  Outcome o;
  const auto existing = wc::read_summary((kData / "scenarios" / "existing.summary").string());
  const auto proposed = wc::read_summary((kData / "scenarios" / "proposed.summary").string());
  const auto report = wc::compare_scenarios(existing, proposed);
  double worst = 0.0;
  for (const auto& printed : published::kPrinted) {
    const double got = report.improvement(printed.key);
    worst = std::max(worst, std::abs(got - printed.percent));
    o.require(std::abs(got - printed.percent) <= 1.0,
              std::string(printed.key) + " = " + fixed(got, 2) + "%, printed " + fixed(printed.percent, 1) + "%");
  }
  if (o.pass) o.detail = "7 percentages within " + fixed(worst, 2) + " pt of the printed column";
  return o;
}

// 2. Internal consistency of both columns.
Outcome summary_consistency() {
  Outcome o;
  double worst = 0.0;
  for (const auto& s : {published::existing(), published::proposed()}) {
    try {
      s.validate();
    } catch (const wc::Error& e) {
      o.require(false, e.what());
    }
    worst = std::max({worst, s.distance_gap(), s.time_gap()});
  }
  o.require(worst <= 0.05, "worst gap " + fixed(100 * worst, 2) + "%");
  auto broken = published::proposed();
  broken.avg_route_h = 1.5;
  bool rejected = false;
  try {
    broken.validate();
  } catch (const wc::Error& e) {
    rejected = e.kind() == wc::ErrorKind::kInconsistentSummary;
  }
  o.require(rejected, "an inconsistent summary was accepted");
  if (o.pass) o.detail = "worst trucks x average vs total gap " + fixed(100 * worst, 2) + "%";
  return o;
}

// 3. Calibrate, then recompute the published totals.
Outcome calibration_round_trip() {
  Outcome o;
  double worst = 0.0;
  int checked = 0;
  for (const auto& s : {published::existing(), published::proposed()}) {
    const auto f = wc::calibrate_factors(s);
    const auto gas = wc::emissions(s.total_km, 0, f);
    const std::pair<double, double> pairs[] = {{wc::energy_consumption(s.total_km, 0, f), s.energy_mj_day},
                                               {gas.co_g, s.co_g_day},
                                               {gas.co2_g, s.co2_g_day},
                                               {gas.nox_g, s.nox_g_day}};
    for (const auto& [got, want] : pairs) {
      const double rel = std::abs(got - want) / want;
      worst = std::max(worst, rel);
      o.require(rel < 0.005, s.name + ": " + fixed(got, 3) + " vs " + fixed(want, 3));
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " totals, worst relative error " + wc::text::format_double(worst);
  return o;
}

// 4. Dijkstra against exhaustive enumeration.
Outcome shortest_path_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::size_t pairs = 0;
  for (int g = 0; g < 200 && o.pass; ++g) {
    const int n = oracle::uniform_int(rng, 2, 10);
    const auto net = oracle::random_graph(rng, n, oracle::uniform_int(rng, 0, 25));
    std::vector<wc::NodeId> ids;
    for (const auto& node : net.nodes()) ids.push_back(node.id);
    for (const auto metric : {wc::Metric::kTime, wc::Metric::kDistance}) {
      const auto m = wc::cost_matrix(net, ids, ids, metric, 1);
      const auto again = wc::cost_matrix(net, ids, ids, metric, 3);
      for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = 0; b < ids.size(); ++b) {
          const double want = oracle::min_simple_path(net, ids[a], ids[b], metric);
          const double got = m.at(a, b);
          o.require(got == want || (wc::is_unreachable(got) && want == oracle::kInf),
                    "graph " + std::to_string(g) + " pair " + std::to_string(ids[a]) + "->" + std::to_string(ids[b]));
          o.require(std::memcmp(&got, &again.values[a * ids.size() + b], sizeof got) == 0,
                    "graph " + std::to_string(g) + " differs between runs");
          ++pairs;
        }
      }
    }
  }
  if (o.pass) o.detail = "200 graphs, " + std::to_string(pairs) + " origin/destination pairs exact and repeatable";
  return o;
}

// 5. Heuristic routing against the exact optimum.
Outcome vrp_oracle() {
  Outcome o;
  std::mt19937_64 rng(777);
  int exact = 0;
  double worst = 1.0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    const int n = oracle::uniform_int(rng, 4, 7);
    wc::RoadNetwork net;
    net.add_node(1, 0, 0);
    for (int k = 0; k < n; ++k) net.add_node(k + 2, oracle::uniform(rng, -4000, 4000), oracle::uniform(rng, -4000, 4000));
    for (const auto& a : net.nodes()) {
      for (const auto& b : net.nodes()) {
        if (a.id == b.id) continue;
        net.add_edge(a.id, b.id, wc::euclidean(a.x_m, a.y_m, b.x_m, b.y_m), 10.0 * oracle::uniform_int(rng, 2, 6));
      }
    }
    std::vector<wc::StopPoint> stops;
    std::vector<wc::NodeId> nodes{1};
    for (int k = 0; k < n; ++k) {
      stops.push_back({k + 1, k + 2, oracle::uniform(rng, 300, 600), 1800, {}, false});
      nodes.push_back(k + 2);
    }
    const wc::FleetSpec fleet;
    const wc::Depot depot{1};
    const auto mats = wc::travel_matrices(net, nodes, wc::Metric::kTime, 1);
    const auto plan = wc::solve_vrp(mats, stops, depot, fleet, wc::Metric::kTime, 1 + trial);
    const auto best = wc::brute_force_vrp(mats, stops, depot, fleet, wc::Metric::kTime);
    const auto problem = wc::check_plan(plan, stops, fleet);
    o.require(problem.empty(), "instance " + std::to_string(trial) + ": " + problem);
    const double ratio = plan.cost() / best.cost();
    worst = std::max(worst, ratio);
    o.require(ratio <= 1.15, "instance " + std::to_string(trial) + " ratio " + fixed(ratio, 4));
    o.require(ratio >= 1.0 - 1e-9, "instance " + std::to_string(trial) + " beats the exhaustive optimum");
    if (ratio <= 1.0 + 1e-9) ++exact;
  }
  o.require(exact >= 80, std::to_string(exact) + "/100 instances optimal");
  if (o.pass) o.detail = std::to_string(exact) + "/100 optimal, worst ratio " + fixed(worst, 4);
  return o;
}

// Nearest node, smaller id on ties.
const wc::Node& nearest_node(const wc::RoadNetwork& net, double x, double y) {
  const wc::Node* best = nullptr;
  double best_d = oracle::kInf;
  for (const auto& n : net.nodes()) {
    const double d = std::hypot(n.x_m - x, n.y_m - y);
    if (d < best_d - 1e-9 || (std::abs(d - best_d) <= 1e-9 && best && n.id < best->id)) {
      best = &n;
      best_d = d;
    }
  }
  return *best;
}

// 6. Coverage on synthetic cities plus the canonical cluster.
Outcome coverage_properties() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::size_t points = 0;
  for (int city_no = 0; city_no < 100 && o.pass; ++city_no) {
    wc::SyntheticCitySpec spec;
    spec.seed = 5000 + city_no;
    spec.cols = oracle::uniform_int(rng, 1, 5);
    spec.rows = oracle::uniform_int(rng, 1, 5);
    spec.block_m = oracle::uniform(rng, 80, 400);
    spec.buildings_per_block = oracle::uniform_int(rng, 0, 10);
    spec.units_per_building = oracle::uniform_int(rng, 0, 40);
    const auto city = wc::gen_synthetic_city(spec);
    const auto demands = wc::aggregate_demand(city.buildings, 2.49);
    wc::CoverageConfig cfg;
    cfg.distance_mode = city_no % 2 == 0 ? wc::DistanceMode::kNetwork : wc::DistanceMode::kEuclidean;
    const auto stops = wc::place_stops(city.network, demands, cfg);
    const auto street = oracle::all_pairs(city.network, wc::Metric::kDistance);
    const std::string where = "city " + std::to_string(city_no) + ": ";

    std::map<wc::DemandId, const wc::StopPoint*> owner;
    double assigned = 0.0;
    for (const auto& s : stops) {
      assigned += s.assigned_demand_kg;
      o.require(s.overflow || s.assigned_demand_kg <= cfg.max_stop_load_kg + 1e-9, where + "stop over the load cap");
      for (const auto id : s.covered_demand_ids) {
        o.require(owner.emplace(id, &s).second, where + "demand " + std::to_string(id) + " claimed twice");
      }
    }
    double total = 0.0;
    for (const auto& d : demands) {
      total += d.waste_kg_day;
      const auto it = owner.find(d.id);
      o.require(it != owner.end(), where + "demand " + std::to_string(d.id) + " uncovered");
      if (it == owner.end()) continue;
      const auto& stop_node = city.network.node(it->second->node);
      double dist;
      if (cfg.distance_mode == wc::DistanceMode::kEuclidean) {
        dist = std::hypot(d.x_m - stop_node.x_m, d.y_m - stop_node.y_m);
      } else {
        const auto& attach = nearest_node(city.network, d.x_m, d.y_m);
        dist = std::hypot(d.x_m - attach.x_m, d.y_m - attach.y_m) +
               street[city.network.index_of(attach.id)][city.network.index_of(stop_node.id)];
      }
      o.require(dist <= cfg.radius_m + 1e-9, where + "demand " + std::to_string(d.id) + " is " + fixed(dist, 1) + " m away");
      ++points;
    }
    o.require(owner.size() == demands.size(), where + "stops claim unknown demand points");
    o.require(std::abs(assigned - total) <= 1e-9 * std::max(1.0, total), where + "mass not conserved");
  }

  // 26 buildings x 4 floors x 2 units around one street corner.
  wc::RoadNetwork net;
  net.add_node(1, 0, 0);
  net.add_node(2, 500, 0);
  net.add_edge(1, 2, 500, 40);
  net.add_edge(2, 1, 500, 40);
  std::vector<wc::Building> cluster;
  for (int i = 0; i < 26; ++i) cluster.push_back({i + 1, 4.0 * i - 50.0, 30.0, 4 * 2});
  const auto cluster_stops = wc::place_stops(net, wc::aggregate_demand(cluster, 2.49), {});
  o.require(cluster_stops.size() == 1, "canonical cluster produced " + std::to_string(cluster_stops.size()) + " stops");
  if (cluster_stops.size() == 1) {
    o.require(std::abs(cluster_stops[0].assigned_demand_kg - 517.92) < 1e-9,
              "canonical cluster load " + wc::text::format_double(cluster_stops[0].assigned_demand_kg));
  }
  if (o.pass) {
    o.detail = "100 cities, " + std::to_string(points) + " demand points covered within 300 m; cluster -> 1 stop of " +
               fixed(cluster_stops[0].assigned_demand_kg, 2) + " kg";
  }
  return o;
}

int run_plan(const fs::path& out) {
  const std::string cmd = std::string("\"") + WASTECOLLECT_CLI + "\" plan \"" + (kData / "demo" / "demo.conf").string() +
                          "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// 7. Bundled demo through the command-line tool.
Outcome demo_pipeline() {
  Outcome o;
  const auto base = fs::temp_directory_path() / "wastecollect_acceptance_demo";
  fs::remove_all(base);
  double slowest = 0.0;
  for (const char* run : {"a", "b"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int status = run_plan(base / run);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    o.require(status == 0, std::string("plan exited with ") + std::to_string(status));
    o.require(secs < 5.0, "plan took " + fixed(secs, 2) + " s");
  }
  for (const char* f : {"stops.csv", "plan.csv", "routes.geojson", "summary.txt", "report.csv"}) {
    o.require(fs::exists(base / "a" / f), std::string(f) + " missing");
    o.require(slurp(base / "a" / f) == slurp(base / "b" / f), std::string(f) + " differs between runs");
  }

  const auto stops = wc::read_stops((base / "a" / "stops.csv").string());
  const auto plan = wc::read_plan((base / "a" / "plan.csv").string());
  const auto demands = wc::read_buildings((kData / "demo" / "buildings.csv").string());
  o.require(demands.size() >= 50 && demands.size() <= 70, std::to_string(demands.size()) + " demand points");
  std::set<wc::StopId> routed;
  for (const auto& t : plan.all_trips()) routed.insert(t.stop_ids.begin(), t.stop_ids.end());
  o.require(routed.size() == stops.size(), "plan does not visit every stop");

  const auto geo = nlohmann::json::parse(slurp(base / "a" / "routes.geojson"));
  const auto trips = plan.all_trips();
  const auto& features = geo.at("features");
  o.require(features.size() == trips.size(), "one polyline per trip expected");
  double worst = 0.0;
  for (std::size_t i = 0; i < features.size() && i < trips.size(); ++i) {
    const auto& c = features[i].at("geometry").at("coordinates");
    double length = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      length += std::hypot(c[k][0].get<double>() - c[k - 1][0].get<double>(),
                           c[k][1].get<double>() - c[k - 1][1].get<double>());
    }
    const double rel = std::abs(length - trips[i].distance_m) / trips[i].distance_m;
    worst = std::max(worst, rel);
    o.require(rel <= 1e-6, "trip " + std::to_string(i) + " polyline " + fixed(length, 3) + " m vs " +
                               fixed(trips[i].distance_m, 3) + " m");
  }
  fs::remove_all(base);
  if (o.pass) {
    o.detail = std::to_string(demands.size()) + " demand points, " + std::to_string(stops.size()) + " stops, " +
               std::to_string(trips.size()) + " trip(s); identical reruns, slowest " + fixed(slowest, 2) +
               " s, polyline error " + wc::text::format_double(worst);
  }
  return o;
}

// 8. First-fit-decreasing against exhaustive packing.
Outcome fleet_sizing() {
  Outcome o;
  std::mt19937_64 rng(8080);
  const double shift = 8 * 3600.0;
  int trucks = 0;
  for (int c = 0; c < 50; ++c) {
    const int n = oracle::uniform_int(rng, 1, 6);
    std::vector<wc::Trip> trips(n);
    std::vector<double> durations;
    for (auto& t : trips) {
      // One stop with unloading is 45 min at least; a trip never exceeds the shift.
      t.total_time_s = oracle::uniform(rng, 0.75 * 3600, shift);
      durations.push_back(t.total_time_s);
    }
    const auto ffd = wc::size_fleet(trips, shift).fleet_size();
    const auto best = static_cast<std::size_t>(oracle::min_bins(durations, shift));
    trucks += static_cast<int>(ffd);
    o.require(ffd == best, "case " + std::to_string(c) + ": " + std::to_string(ffd) + " trucks vs optimum " +
                               std::to_string(best));
  }
  if (o.pass) o.detail = "50 cases, " + std::to_string(trucks) + " trucks in total, all optimal";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"Published comparison reproduction", 1.0, comparison_reproduction},
      {"Published summary consistency", 1.0, summary_consistency},
      {"Calibration round-trip", 1.0, calibration_round_trip},
      {"Shortest-path oracle", 10.0, shortest_path_oracle},
      {"VRP oracle", 60.0, vrp_oracle},
      {"Coverage properties", 60.0, coverage_properties},
      {"End-to-end pipeline", 10.0, demo_pipeline},
      {"Fleet sizing", 10.0, fleet_sizing},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs >= c.limit_s) {
      o.pass = false;
      o.detail = "took " + fixed(secs, 2) + " s, limit " + fixed(c.limit_s, 0) + " s";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << c.name << ": " << o.detail << " ["
              << fixed(secs, 3) << " s]\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
