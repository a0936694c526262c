#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "published_scenarios.hpp"
#include "wastecollect/wastecollect.hpp"

namespace wc = wastecollect;
namespace fs = std::filesystem;

namespace {

const fs::path kDemo = fs::path(WASTECOLLECT_SOURCE_DIR) / "data" / "demo";
const fs::path kScenarios = fs::path(WASTECOLLECT_SOURCE_DIR) / "data" / "scenarios";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Scratch {
 public:
  explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("wastecollect_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(dir_ / name) << content;
    return dir_ / name;
  }

 private:
  fs::path dir_;
};

struct CliResult {
  int status;
  std::string output;
};

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const auto log = scratch / "cli.log";
  const std::string cmd = std::string("\"") + WASTECOLLECT_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

// Demo config with absolute data paths and `extra` appended.
std::string demo_config(const std::string& extra = {}) {
  std::string text = slurp(kDemo / "demo.conf");
  for (const char* name : {"nodes.csv", "edges.csv", "buildings.csv", "factors.csv"}) {
    const std::string rel = std::string("=") + name;
    const auto at = text.find(rel);
    if (at != std::string::npos) text.replace(at, rel.size(), "=" + (kDemo / name).string());
  }
  return text + extra;
}

std::string summary_block(const wc::ScenarioSummary& s, const std::string& prefix) {
  std::ostringstream out;
  wc::write_summary(s, out);
  std::istringstream lines(out.str());
  std::string line, block;
  while (std::getline(lines, line)) block += prefix + "." + line + "\n";
  return block;
}

}  // namespace

TEST(Config, LoadsDemo) {
  const auto cfg = wc::load_config((kDemo / "demo.conf").string());
  EXPECT_EQ(cfg.name, "Demo");
  EXPECT_EQ(cfg.fleet.capacity_kg, 4000);
  EXPECT_EQ(cfg.coverage.radius_m, 300);
  EXPECT_EQ(cfg.coverage.service_time_s, 1800);
  EXPECT_EQ(cfg.depot_y_m, -500);
  EXPECT_EQ(cfg.objective, wc::Metric::kTime);
  EXPECT_TRUE(fs::path(cfg.nodes_path).is_absolute() || fs::exists(cfg.nodes_path));
  ASSERT_TRUE(cfg.existing.has_value());
  EXPECT_EQ(cfg.existing->total_km, 1756);
  EXPECT_FALSE(cfg.proposed_override.has_value());
}

TEST(Config, Errors) {
  Scratch s("config_errors");
  auto expect_config_error = [&](const std::string& text) {
    const auto path = s.write("bad.conf", text);
    try {
      wc::load_config(path.string());
      ADD_FAILURE() << text;
    } catch (const wc::Error& e) {
      EXPECT_EQ(e.kind(), wc::ErrorKind::kConfig) << e.what();
    }
  };
  expect_config_error(demo_config("fleet.colour=red\n"));
  expect_config_error(demo_config("coverage.distance_mode=manhattan\n"));
  expect_config_error(demo_config("fleet.shift_s=-1\n"));
  expect_config_error("network.nodes=missing.csv\nnetwork.edges=missing.csv\nbuildings=missing.csv\n"
                      "depot.x_m=0\ndepot.y_m=0\n");
  expect_config_error(demo_config("existing.total_km=5000\n").replace(demo_config().find("existing.total_km=1756\n"),
                                                                      std::string("existing.total_km=1756\n").size(), ""));
  const auto ok = wc::load_config(s.write("ok.conf", demo_config("coverage.candidate_nodes=1;6;12\n")).string());
  EXPECT_EQ(ok.coverage.candidate_nodes, (std::vector<wc::NodeId>{1, 6, 12}));
}

TEST(SyntheticCity, GridCounts) {
  wc::SyntheticCitySpec spec;
  spec.cols = 2;
  spec.rows = 2;
  spec.block_m = 200;
  const auto city = wc::gen_synthetic_city(spec);
  EXPECT_EQ(city.network.node_count(), 9u);
  EXPECT_EQ(city.network.edge_count(), 24u);
  EXPECT_TRUE(city.buildings.empty());
  EXPECT_FALSE(city.facility_node.has_value());
  // Strongly connected: every node reaches every other.
  for (const auto& a : city.network.nodes()) {
    for (const auto& b : city.network.nodes()) {
      EXPECT_NO_THROW(wc::shortest_path(city.network, a.id, b.id, wc::Metric::kDistance));
    }
  }
}

TEST(SyntheticCity, SameSeedSameFiles) {
  Scratch s("synth");
  wc::SyntheticCitySpec spec;
  spec.seed = 99;
  spec.buildings_per_block = 5;
  spec.depot_link_m = 300;
  wc::write_synthetic_city(wc::gen_synthetic_city(spec), (s.dir() / "a").string());
  wc::write_synthetic_city(wc::gen_synthetic_city(spec), (s.dir() / "b").string());
  for (const char* f : {"nodes.csv", "edges.csv", "buildings.csv"}) {
    EXPECT_EQ(slurp(s.dir() / "a" / f), slurp(s.dir() / "b" / f)) << f;
  }
  spec.seed = 100;
  wc::write_synthetic_city(wc::gen_synthetic_city(spec), (s.dir() / "c").string());
  EXPECT_NE(slurp(s.dir() / "a" / "buildings.csv"), slurp(s.dir() / "c" / "buildings.csv"));

  const auto back = wc::read_network((s.dir() / "a" / "nodes.csv").string(), (s.dir() / "a" / "edges.csv").string());
  EXPECT_EQ(back.node_count(), 17u);
  EXPECT_EQ(wc::read_buildings((s.dir() / "a" / "buildings.csv").string()).size(), 45u);
}

TEST(Geometry, OutAndBackAndEmpty) {
  wc::RoadNetwork net;
  net.add_node(1, 0, 0);
  net.add_node(2, 300, 0);
  net.add_node(3, 300, 400);
  for (const auto& [a, b] : {std::pair{1, 2}, std::pair{2, 3}}) {
    const double len = wc::euclidean(net.node(a).x_m, net.node(a).y_m, net.node(b).x_m, net.node(b).y_m);
    net.add_edge(a, b, len, 40);
    net.add_edge(b, a, len, 40);
  }
  const std::vector<wc::StopPoint> stops{{1, 3, 10, 1800, {1}, false}};
  wc::Trip trip;
  trip.stop_ids = {1};
  trip.distance_m = 1400;
  auto plan = wc::make_plan(std::vector<wc::Trip>{trip}, {}, wc::Metric::kDistance);
  const auto geo = wc::emit_route_geometry(plan, stops, wc::Depot{1}, net);
  ASSERT_EQ(geo["features"].size(), 1u);
  const auto& coords = geo["features"][0]["geometry"]["coordinates"];
  ASSERT_EQ(coords.size(), 5u);
  EXPECT_EQ(coords[2][0].get<double>(), 300.0);
  EXPECT_EQ(coords[2][1].get<double>(), 400.0);
  EXPECT_EQ(geo["features"][0]["properties"]["distance_m"].get<double>(), 1400.0);

  const auto empty = wc::emit_route_geometry(wc::make_plan({}, {}, wc::Metric::kTime), stops, wc::Depot{1}, net);
  EXPECT_EQ(empty["type"], "FeatureCollection");
  EXPECT_TRUE(empty["features"].empty());

  trip.stop_ids = {7};
  plan = wc::make_plan(std::vector<wc::Trip>{trip}, {}, wc::Metric::kDistance);
  EXPECT_THROW(wc::emit_route_geometry(plan, stops, wc::Depot{1}, net), wc::Error);
}

TEST(Pipeline, DemoEndToEnd) {
  const auto cfg = wc::load_config((kDemo / "demo.conf").string());
  const auto r = wc::run_pipeline(cfg);
  EXPECT_EQ(r.demands.size(), 63u);
  EXPECT_EQ(r.stops.size(), 4u);
  EXPECT_EQ(wc::check_plan(r.plan, r.stops, cfg.fleet), "");
  ASSERT_TRUE(r.report.has_value());

  double buildings_kg = 0.0;
  for (const auto& b : wc::read_buildings(cfg.buildings_path)) buildings_kg += b.dwelling_units * 2.49;
  double trip_kg = 0.0;
  for (const auto& t : r.plan.all_trips()) trip_kg += t.load_kg;
  EXPECT_NEAR(trip_kg, buildings_kg, 1e-9 * buildings_kg);

  const auto& features = r.geometry["features"];
  ASSERT_EQ(features.size(), r.plan.trip_count);
  for (const auto& f : features) {
    double length = 0.0;
    const auto& c = f["geometry"]["coordinates"];
    for (std::size_t k = 1; k < c.size(); ++k) {
      length += std::hypot(c[k][0].get<double>() - c[k - 1][0].get<double>(),
                           c[k][1].get<double>() - c[k - 1][1].get<double>());
    }
    const double d = f["properties"]["distance_m"].get<double>();
    EXPECT_NEAR(length, d, 1e-6 * d);
  }
}

TEST(Pipeline, DemoMatchesGoldenOutputs) {
  Scratch s("golden");
  const auto r = wc::run_pipeline(wc::load_config((kDemo / "demo.conf").string()));
  wc::write_outputs(r, s.dir().string(), wc::ReportFormat::kTable);
  for (const char* f : {"stops.csv", "plan.csv", "routes.geojson", "summary.txt", "report.csv"}) {
    EXPECT_EQ(slurp(s.dir() / f), slurp(kDemo / "expected" / f)) << f;
  }
}

TEST(Pipeline, DepotFarFromNetwork) {
  Scratch s("far_depot");
  const auto path = s.write("far.conf", demo_config("depot.snap_max_m=50\n").replace(
                                            demo_config().find("depot.y_m=-500"), 14, "depot.y_m=-9000"));
  try {
    wc::run_pipeline(wc::load_config(path.string()));
    FAIL();
  } catch (const wc::StageError& e) {
    EXPECT_EQ(e.stage(), "network/snap");
    EXPECT_EQ(e.kind(), wc::ErrorKind::kNoNodeWithinRange);
  }
  const auto cli = run_cli("plan \"" + path.string() + "\" --out \"" + (s.dir() / "out").string() + "\"", s.dir());
  EXPECT_NE(cli.status, 0);
  EXPECT_NE(cli.output.find("network/snap"), std::string::npos) << cli.output;
}

TEST(Pipeline, PublishedSummariesReproducePercentColumn) {
  Scratch s("scenarios");
  const auto path = s.write("t2.conf", demo_config(summary_block(published::proposed(), "proposed")));
  const auto r = wc::run_pipeline(wc::load_config(path.string()));
  ASSERT_TRUE(r.report.has_value());
  EXPECT_EQ(r.report->proposed.total_km, 3347);
  for (const auto& printed : published::kPrinted) EXPECT_NEAR(r.report->improvement(printed.key), printed.percent, 1.0);
}

TEST(Cli, Compare) {
  Scratch s("cli_compare");
  const auto args = "compare \"" + (kScenarios / "existing.summary").string() + "\" \"" +
                    (kScenarios / "proposed.summary").string() + "\"";
  const auto table = run_cli(args, s.dir());
  EXPECT_EQ(table.status, 0);
  EXPECT_NE(table.output.find("Total Time Consumption (h/day),84.6,62.2,26.5%"), std::string::npos) << table.output;
  const auto text = run_cli("--format text " + args, s.dir());
  EXPECT_EQ(text.status, 0);
  EXPECT_NE(text.output.find("worse by 90.6%"), std::string::npos) << text.output;
}

TEST(Cli, PlanSynthVerify) {
  Scratch s("cli_plan");
  const auto out = s.dir() / "out";
  const auto plan = run_cli("plan \"" + (kDemo / "demo.conf").string() + "\" --out \"" + out.string() + "\"", s.dir());
  ASSERT_EQ(plan.status, 0) << plan.output;
  EXPECT_EQ(slurp(out / "plan.csv"), slurp(kDemo / "expected" / "plan.csv"));

  const auto verify = run_cli("verify \"" + (out / "stops.csv").string() + "\" \"" + (kDemo / "buildings.csv").string() +
                                  "\" \"" + kDemo.string() + "\"",
                              s.dir());
  EXPECT_EQ(verify.status, 0) << verify.output;
  EXPECT_NE(verify.output.find("uncovered: 0"), std::string::npos);

  const auto tight = run_cli("verify \"" + (out / "stops.csv").string() + "\" \"" +
                                 (kDemo / "buildings.csv").string() + "\" \"" + kDemo.string() + "\" --radius 50",
                             s.dir());
  EXPECT_EQ(tight.status, 3);

  const auto by_distance = run_cli("--objective distance --seed 5 --format text plan \"" +
                                       (kDemo / "demo.conf").string() + "\" --out \"" + (s.dir() / "d").string() + "\"",
                                   s.dir());
  EXPECT_EQ(by_distance.status, 0) << by_distance.output;
  EXPECT_TRUE(fs::exists(s.dir() / "d" / "report.txt"));

  const auto synth = run_cli("synth \"" + (kDemo / "city.spec").string() + "\" --out \"" + (s.dir() / "city").string() + "\"",
                             s.dir());
  EXPECT_EQ(synth.status, 0);
  EXPECT_EQ(slurp(s.dir() / "city" / "buildings.csv"), slurp(kDemo / "buildings.csv"));
}

TEST(Cli, ExitCodes) {
  Scratch s("cli_exit");
  EXPECT_EQ(run_cli("", s.dir()).status, 2);
  EXPECT_EQ(run_cli("plan", s.dir()).status, 2);
  EXPECT_EQ(run_cli("--objective fastest plan \"" + (kDemo / "demo.conf").string() + "\" --out \"" +
                        (s.dir() / "o").string() + "\"",
                    s.dir())
                .status,
            2);
  EXPECT_EQ(run_cli("plan \"" + (s.dir() / "nope.conf").string() + "\"", s.dir()).status, 2);

  // Every demo stop outweighs a 100 kg truck.
  const auto heavy = s.write("heavy.conf", demo_config().replace(demo_config().find("fleet.capacity_kg=4000"), 22,
                                                                 "fleet.capacity_kg=100"));
  EXPECT_EQ(run_cli("plan \"" + heavy.string() + "\" --out \"" + (s.dir() / "h").string() + "\"", s.dir()).status, 3);

  s.write("broken.csv", "id,x_m\n1,0\n");
  const auto broken = s.write("broken.conf", demo_config().replace(demo_config().find("network.nodes="),
                                                                   std::string("network.nodes=").size() +
                                                                       (kDemo / "nodes.csv").string().size(),
                                                                   "network.nodes=" + (s.dir() / "broken.csv").string()));
  EXPECT_EQ(run_cli("plan \"" + broken.string() + "\" --out \"" + (s.dir() / "b").string() + "\"", s.dir()).status, 4);
}
