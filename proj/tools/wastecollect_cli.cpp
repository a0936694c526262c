// Command-line front end:
//
//   wastecollect plan <config>                       solve a scenario, write outputs
//   wastecollect synth <spec>                        generate a synthetic city
//   wastecollect compare <existing> <proposed>       scenario comparison report
//   wastecollect verify <stops> <buildings> <network>  audit stop coverage
//
// Exit codes: 0 success, 2 config error, 3 infeasible instance, 4 data error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wastecollect/wastecollect.hpp"

namespace wc = wastecollect;

namespace {

struct Options {
  std::string objective;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string format = "table";
};

int run_plan(const std::string& config_path, const Options& opt) {
  auto cfg = wc::detail::stage("config", [&] { return wc::load_config(config_path); });
  if (!opt.objective.empty()) cfg.objective = wc::detail::stage("config", [&] { return wc::parse_metric(opt.objective); });
  if (opt.seed) cfg.seed = *opt.seed;
  const auto format = wc::detail::stage("config", [&] { return wc::parse_report_format(opt.format); });

  const auto result = wc::run_pipeline(cfg);
  const auto files = wc::write_outputs(result, opt.out_dir, format);

  const auto& m = result.metrics;
  std::cout << "demand points: " << result.demands.size() << "\n"
            << "stops:         " << result.stops.size() << "\n"
            << "trips:         " << m.trip_count << "\n"
            << "trucks:        " << m.fleet_size << "\n"
            << "distance:      " << wc::text::format_fixed(m.total_distance_m / 1000.0, 3) << " km\n"
            << "work time:     " << wc::text::format_fixed(m.total_time_s / 3600.0, 3) << " h (drive "
            << wc::text::format_fixed(m.total_drive_s / 3600.0, 3) << " h)\n"
            << "wrote " << files.stops << ", " << files.plan << ", " << files.routes << ", " << files.summary;
  if (!files.report.empty()) std::cout << ", " << files.report;
  std::cout << "\n";
  if (result.report) std::cout << "\n" << wc::format_report(*result.report, format);
  return 0;
}

int run_synth(const std::string& spec_path, const Options& opt) {
  const auto spec = wc::detail::stage("config", [&] {
    return wc::SyntheticCitySpec::from(wc::KeyValues::read_file(spec_path));
  });
  const auto city = wc::gen_synthetic_city(spec);
  const auto files = wc::detail::stage("output", [&] { return wc::write_synthetic_city(city, opt.out_dir); });
  std::cout << "nodes: " << city.network.node_count() << ", edges: " << city.network.edge_count()
            << ", buildings: " << city.buildings.size();
  if (city.facility_node) std::cout << ", facility node: " << *city.facility_node;
  std::cout << "\nwrote " << files.nodes << ", " << files.edges << ", " << files.buildings << "\n";
  return 0;
}

int run_compare(const std::string& existing_path, const std::string& proposed_path, const Options& opt) {
  const auto format = wc::detail::stage("config", [&] { return wc::parse_report_format(opt.format); });
  const auto existing = wc::detail::stage("config", [&] { return wc::read_summary(existing_path); });
  const auto proposed = wc::detail::stage("config", [&] { return wc::read_summary(proposed_path); });
  const auto report = wc::detail::stage("impact", [&] { return wc::compare_scenarios(existing, proposed); });
  std::cout << wc::format_report(report, format);
  return 0;
}

int run_verify(const std::string& stops_path, const std::string& buildings_path, const std::string& network_path,
               const wc::CoverageConfig& cov, double rate) {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  if (std::filesystem::is_directory(network_path)) {
    nodes = std::filesystem::path(network_path) / "nodes.csv";
    edges = std::filesystem::path(network_path) / "edges.csv";
  } else {
    edges = network_path;
    nodes = edges.parent_path() / "nodes.csv";
  }
  const auto net = wc::detail::stage("network/load", [&] { return wc::read_network(nodes.string(), edges.string()); });
  const auto demands = wc::detail::stage("demand", [&] {
    return wc::aggregate_demand(wc::read_buildings(buildings_path), rate);
  });
  const auto stops = wc::detail::stage("coverage", [&] { return wc::read_stops(stops_path); });
  const auto report = wc::verify_coverage(stops, demands, net, cov);

  std::cout << "stops: " << stops.size() << ", demand points: " << demands.size() << "\n"
            << "uncovered: " << report.uncovered.size() << "\n"
            << "duplicated: " << report.duplicated.size() << "\n"
            << "unknown ids: " << report.unknown.size() << "\n"
            << "overloaded stops: " << report.overloaded_stops.size() << "\n"
            << "max load: " << wc::text::format_fixed(report.max_load_kg, 2) << " kg\n"
            << "load histogram (" << wc::text::format_fixed(report.bin_width_kg, 1) << " kg bins): "
            << wc::text::join(report.load_histogram, ' ') << "\n";
  if (!report.uncovered.empty()) std::cout << "uncovered ids: " << wc::text::join(report.uncovered, ';') << "\n";
  return report.ok() && report.overloaded_stops.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Municipal solid-waste collection planning"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--objective", opt.objective, "Routing objective: time|distance");
  app.add_option("--seed", opt.seed, "Solver seed");
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--format", opt.format, "Report format: table|text");

  std::string config_path;
  auto* plan = app.add_subcommand("plan", "Place stops, route the fleet and report impacts");
  plan->add_option("config", config_path, "Scenario config file")->required();

  std::string spec_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic grid city");
  synth->add_option("spec", spec_path, "City spec file")->required();

  std::string existing_path;
  std::string proposed_path;
  auto* compare = app.add_subcommand("compare", "Compare two scenario summaries");
  compare->add_option("existing", existing_path, "Existing scenario summary")->required();
  compare->add_option("proposed", proposed_path, "Proposed scenario summary")->required();

  std::string stops_path;
  std::string buildings_path;
  std::string network_path;
  wc::CoverageConfig cov;
  std::string mode = "network";
  double rate = wc::kDefaultGenerationRate;
  auto* verify = app.add_subcommand("verify", "Audit a stops file against buildings and the network");
  verify->add_option("stops", stops_path, "Stops file")->required();
  verify->add_option("buildings", buildings_path, "Buildings file")->required();
  verify->add_option("network", network_path, "Network directory, or edge file next to nodes.csv")->required();
  verify->add_option("--radius", cov.radius_m, "Service radius in meters");
  verify->add_option("--distance-mode", mode, "network|euclidean");
  verify->add_option("--max-load", cov.max_stop_load_kg, "Per-stop load cap in kg");
  verify->add_option("--rate", rate, "Generation rate in kg/unit/day");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return run_plan(config_path, opt);
    if (synth->parsed()) return run_synth(spec_path, opt);
    if (compare->parsed()) return run_compare(existing_path, proposed_path, opt);
    cov.distance_mode = wc::detail::stage("config", [&] { return wc::parse_distance_mode(mode); });
    return run_verify(stops_path, buildings_path, network_path, cov, rate);
  } catch (const wc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wc::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
