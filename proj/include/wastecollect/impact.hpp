#pragma once

// Energy, time and emission accounting for collection scenarios, and
// existing-versus-proposed comparison reports.
//
// Energy and each gas follow a linear model per truck class:
//   quantity = per_km * total_km + per_stop * stop_visits
// Factors are calibrated inputs; `calibrate_factors` back-solves distance-only
// factors from a published scenario summary.

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wastecollect/error.hpp"
#include "wastecollect/key_values.hpp"
#include "wastecollect/text_table.hpp"
#include "wastecollect/vrp.hpp"

namespace wastecollect {

struct ImpactFactors {
  std::string truck_class;
  double energy_mj_per_km = 0.0;
  double energy_mj_per_stop = 0.0;
  double co_g_per_km = 0.0;
  double co2_g_per_km = 0.0;
  double nox_g_per_km = 0.0;
  double co_g_per_stop = 0.0;
  double co2_g_per_stop = 0.0;
  double nox_g_per_stop = 0.0;

  void validate() const {
    for (const double v : {energy_mj_per_km, energy_mj_per_stop, co_g_per_km, co2_g_per_km, nox_g_per_km,
                           co_g_per_stop, co2_g_per_stop, nox_g_per_stop}) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidArgument, "impact factors for class '" + truck_class + "' must be >= 0");
      }
    }
  }
};

struct Emissions {
  double co_g = 0.0;
  double co2_g = 0.0;
  double nox_g = 0.0;
};

struct TimeConsumption {
  double drive_h = 0.0;
  double service_h = 0.0;
  double unload_h = 0.0;
  double total_h = 0.0;
};

namespace detail {

inline void require_nonnegative(double total_km, double stop_visits) {
  if (!(total_km >= 0.0) || !(stop_visits >= 0.0)) {
    throw Error(ErrorKind::kNegativeInput, "distance and stop visits must be >= 0");
  }
}

}  // namespace detail

inline double energy_consumption(double total_km, double n_stop_visits, const ImpactFactors& f) {
  detail::require_nonnegative(total_km, n_stop_visits);
  return f.energy_mj_per_km * total_km + f.energy_mj_per_stop * n_stop_visits;
}

inline Emissions emissions(double total_km, double n_stop_visits, const ImpactFactors& f) {
  detail::require_nonnegative(total_km, n_stop_visits);
  return Emissions{f.co_g_per_km * total_km + f.co_g_per_stop * n_stop_visits,
                   f.co2_g_per_km * total_km + f.co2_g_per_stop * n_stop_visits,
                   f.nox_g_per_km * total_km + f.nox_g_per_stop * n_stop_visits};
}

inline TimeConsumption time_consumption(const RouteMetrics& m) {
  TimeConsumption t;
  t.drive_h = m.total_drive_s / 3600.0;
  t.service_h = m.total_service_s / 3600.0;
  t.unload_h = m.total_unload_s / 3600.0;
  t.total_h = t.drive_h + t.service_h + t.unload_h;
  return t;
}

// Daily fleet hours when only the per-route average is known.
inline double fleet_time_h(double n_trucks, double avg_route_h) { return n_trucks * avg_route_h; }

// One column of a scenario comparison, in the units of the published
// comparison table: km, hours, MJ/day, g/day.
struct ScenarioSummary {
  std::string name;
  double n_trucks = 0.0;
  double truck_capacity_kg = 0.0;
  double n_stops = 0.0;
  double avg_stop_time_s = 0.0;
  double avg_route_km = 0.0;
  double total_km = 0.0;
  double avg_route_h = 0.0;
  double total_time_h = 0.0;
  double energy_mj_day = 0.0;
  double co_g_day = 0.0;
  double co2_g_day = 0.0;
  double nox_g_day = 0.0;

  // Relative gap between n_trucks x average and the stated total.
  double distance_gap() const { return gap(avg_route_km, total_km); }
  double time_gap() const { return gap(avg_route_h, total_time_h); }

  // Rejects negative fields and totals that disagree with
  // n_trucks x average by more than `tolerance` (relative to the total).
  void validate(double tolerance = kConsistencyTolerance) const {
    for (const double v : {n_trucks, truck_capacity_kg, n_stops, avg_stop_time_s, avg_route_km, total_km,
                           avg_route_h, total_time_h, energy_mj_day, co_g_day, co2_g_day, nox_g_day}) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kInconsistentSummary, "scenario '" + name + "' has a negative or non-finite field");
      }
    }
    if (distance_gap() > tolerance) {
      throw Error(ErrorKind::kInconsistentSummary,
                  "scenario '" + name + "': trucks x average route distance differs from total by " +
                      text::format_fixed(100.0 * distance_gap(), 2) + "%");
    }
    if (time_gap() > tolerance) {
      throw Error(ErrorKind::kInconsistentSummary, "scenario '" + name +
                                                       "': trucks x average route time differs from total by " +
                                                       text::format_fixed(100.0 * time_gap(), 2) + "%");
    }
  }

  static constexpr double kConsistencyTolerance = 0.05;

 private:
  double gap(double average, double total) const {
    const double implied = n_trucks * average;
    if (total == 0.0) return implied == 0.0 ? 0.0 : 1.0;
    return std::abs(implied - total) / total;
  }
};

// Distance-only factors that reproduce the summary's totals; stop terms are 0.
inline ImpactFactors calibrate_factors(const ScenarioSummary& s, const std::string& truck_class = {}) {
  if (!(s.total_km > 0.0)) {
    throw Error(ErrorKind::kZeroDistance, "cannot calibrate factors for '" + s.name + "' without distance");
  }
  ImpactFactors f;
  f.truck_class = truck_class.empty() ? s.name : truck_class;
  f.energy_mj_per_km = s.energy_mj_day / s.total_km;
  f.co_g_per_km = s.co_g_day / s.total_km;
  f.co2_g_per_km = s.co2_g_day / s.total_km;
  f.nox_g_per_km = s.nox_g_day / s.total_km;
  return f;
}

inline double percent_improvement(double existing_value, double proposed_value) {
  if (!(existing_value > 0.0)) {
    throw Error(ErrorKind::kNonpositiveBaseline, "baseline value must be > 0");
  }
  return (existing_value - proposed_value) / existing_value * 100.0;
}

struct ComparisonReport {
  ScenarioSummary existing;
  ScenarioSummary proposed;
  // Ordered as emitted; negative values are regressions.
  std::vector<std::pair<std::string, double>> improvements;

  double improvement(const std::string& metric) const {
    for (const auto& [k, v] : improvements) {
      if (k == metric) return v;
    }
    throw Error(ErrorKind::kInvalidArgument, "no improvement recorded for '" + metric + "'");
  }
};

namespace metric_key {
inline constexpr const char* kAvgRouteDistance = "avg_route_distance";
inline constexpr const char* kAvgRouteTime = "avg_route_time";
inline constexpr const char* kTotalTime = "total_time";
inline constexpr const char* kCo = "co";
inline constexpr const char* kCo2 = "co2";
inline constexpr const char* kNox = "nox";
inline constexpr const char* kTotalDistance = "total_distance";
}  // namespace metric_key

inline ComparisonReport compare_scenarios(const ScenarioSummary& existing, const ScenarioSummary& proposed) {
  existing.validate();
  proposed.validate();
  ComparisonReport r{existing, proposed, {}};
  auto add = [&](const char* key, double e, double p) { r.improvements.emplace_back(key, percent_improvement(e, p)); };
  add(metric_key::kAvgRouteDistance, existing.avg_route_km, proposed.avg_route_km);
  add(metric_key::kAvgRouteTime, existing.avg_route_h, proposed.avg_route_h);
  add(metric_key::kTotalTime, existing.total_time_h, proposed.total_time_h);
  add(metric_key::kCo, existing.co_g_day, proposed.co_g_day);
  add(metric_key::kCo2, existing.co2_g_day, proposed.co2_g_day);
  add(metric_key::kNox, existing.nox_g_day, proposed.nox_g_day);
  add(metric_key::kTotalDistance, existing.total_km, proposed.total_km);
  return r;
}

// Summary of a solved plan, in the units of the comparison table.
inline ScenarioSummary summarize_plan(const std::string& name, const RouteMetrics& m, const FleetSpec& fleet,
                                      std::size_t n_stops, const ImpactFactors& factors) {
  ScenarioSummary s;
  s.name = name;
  s.n_trucks = static_cast<double>(m.fleet_size);
  s.truck_capacity_kg = fleet.capacity_kg;
  s.n_stops = static_cast<double>(n_stops);
  s.avg_stop_time_s = m.stop_visits > 0 ? m.total_service_s / static_cast<double>(m.stop_visits) : 0.0;
  s.total_km = m.total_distance_m / 1000.0;
  s.avg_route_km = m.avg_route_distance_m / 1000.0;
  s.total_time_h = time_consumption(m).total_h;
  s.avg_route_h = m.avg_route_time_s / 3600.0;
  const double visits = static_cast<double>(m.stop_visits);
  s.energy_mj_day = energy_consumption(s.total_km, visits, factors);
  const auto gas = emissions(s.total_km, visits, factors);
  s.co_g_day = gas.co_g;
  s.co2_g_day = gas.co2_g;
  s.nox_g_day = gas.nox_g;
  return s;
}

// ---------------------------------------------------------------------------
// Summary files use the flat key=value format; the same keys may appear
// under a prefix (e.g. `existing.total_km`) inside a scenario config.

inline ScenarioSummary read_summary(const KeyValues& kv, const std::string& prefix = {}) {
  const std::string p = prefix.empty() ? std::string{} : prefix + ".";
  ScenarioSummary s;
  s.name = kv.str(p + "name", prefix.empty() ? "scenario" : prefix);
  s.n_trucks = kv.number(p + "n_trucks");
  s.truck_capacity_kg = kv.number(p + "truck_capacity_kg", 0.0);
  s.n_stops = kv.number(p + "n_stops", 0.0);
  s.avg_stop_time_s = kv.number(p + "avg_stop_time_s", 0.0);
  s.avg_route_km = kv.number(p + "avg_route_km");
  s.total_km = kv.number(p + "total_km");
  s.avg_route_h = kv.number(p + "avg_route_h");
  s.total_time_h = kv.number(p + "total_time_h");
  s.energy_mj_day = kv.number(p + "energy_mj_day", 0.0);
  s.co_g_day = kv.number(p + "co_g_day");
  s.co2_g_day = kv.number(p + "co2_g_day");
  s.nox_g_day = kv.number(p + "nox_g_day");
  return s;
}

inline ScenarioSummary read_summary(const std::string& path) { return read_summary(KeyValues::read_file(path)); }

inline void write_summary(const ScenarioSummary& s, std::ostream& out) {
  auto line = [&](const char* key, double v) { out << key << '=' << text::format_double(v) << '\n'; };
  out << "name=" << s.name << '\n';
  line("n_trucks", s.n_trucks);
  line("truck_capacity_kg", s.truck_capacity_kg);
  line("n_stops", s.n_stops);
  line("avg_stop_time_s", s.avg_stop_time_s);
  line("avg_route_km", s.avg_route_km);
  line("total_km", s.total_km);
  line("avg_route_h", s.avg_route_h);
  line("total_time_h", s.total_time_h);
  line("energy_mj_day", s.energy_mj_day);
  line("co_g_day", s.co_g_day);
  line("co2_g_day", s.co2_g_day);
  line("nox_g_day", s.nox_g_day);
}

// Factor file: `class,quantity,per_km,per_stop` with quantity one of
// energy_mj, co_g, co2_g, nox_g.
inline std::map<std::string, ImpactFactors> read_factors(const std::string& path) {
  const auto t = text::Table::read_file(path);
  t.require_columns({"class", "quantity", "per_km", "per_stop"});
  std::map<std::string, ImpactFactors> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& cls = t.at(r, "class");
    auto& f = out[cls];
    f.truck_class = cls;
    const double per_km = t.number(r, "per_km");
    const double per_stop = t.at(r, "per_stop").empty() ? 0.0 : t.number(r, "per_stop");
    const auto& q = t.at(r, "quantity");
    if (q == "energy_mj") {
      f.energy_mj_per_km = per_km;
      f.energy_mj_per_stop = per_stop;
    } else if (q == "co_g") {
      f.co_g_per_km = per_km;
      f.co_g_per_stop = per_stop;
    } else if (q == "co2_g") {
      f.co2_g_per_km = per_km;
      f.co2_g_per_stop = per_stop;
    } else if (q == "nox_g") {
      f.nox_g_per_km = per_km;
      f.nox_g_per_stop = per_stop;
    } else {
      throw Error(ErrorKind::kParse, t.where(r) + ": unknown quantity '" + q + "'");
    }
  }
  for (const auto& [cls, f] : out) f.validate();
  return out;
}

inline void write_factors(const ImpactFactors& f, std::ostream& out) {
  out << "class,quantity,per_km,per_stop\n";
  auto row = [&](const char* q, double km, double stop) {
    out << f.truck_class << ',' << q << ',' << text::format_double(km) << ',' << text::format_double(stop) << '\n';
  };
  row("energy_mj", f.energy_mj_per_km, f.energy_mj_per_stop);
  row("co_g", f.co_g_per_km, f.co_g_per_stop);
  row("co2_g", f.co2_g_per_km, f.co2_g_per_stop);
  row("nox_g", f.nox_g_per_km, f.nox_g_per_stop);
}

// ---------------------------------------------------------------------------
// Report emission. Percentages are rounded to one decimal here and nowhere
// else.

enum class ReportFormat { kTable, kText };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "table") return ReportFormat::kTable;
  if (s == "text") return ReportFormat::kText;
  throw Error(ErrorKind::kConfig, "unknown report format '" + std::string(s) + "' (expected table|text)");
}

namespace detail {

struct ReportRow {
  const char* label;
  double existing;
  double proposed;
  int decimals;
  const char* improvement_key;  // nullptr: no percent column
};

inline std::vector<ReportRow> report_rows(const ComparisonReport& r) {
  const auto& e = r.existing;
  const auto& p = r.proposed;
  return {
      {"Number of Trucks", e.n_trucks, p.n_trucks, 0, nullptr},
      {"Truck Capacity (ton)", e.truck_capacity_kg / 1000.0, p.truck_capacity_kg / 1000.0, 1, nullptr},
      {"Number of Stop points", e.n_stops, p.n_stops, 0, nullptr},
      {"Average Time spent at each Collection Point (min.)", e.avg_stop_time_s / 60.0, p.avg_stop_time_s / 60.0, 1,
       nullptr},
      {"Average Route Distance (km)", e.avg_route_km, p.avg_route_km, 1, metric_key::kAvgRouteDistance},
      {"Total Traveled Distance (km)", e.total_km, p.total_km, 1, metric_key::kTotalDistance},
      {"Average Route Time (hr.)", e.avg_route_h, p.avg_route_h, 2, metric_key::kAvgRouteTime},
      {"Total Energy Consumption (MJ/day)", e.energy_mj_day, p.energy_mj_day, 0, nullptr},
      {"Total Time Consumption (h/day)", e.total_time_h, p.total_time_h, 1, metric_key::kTotalTime},
      {"CO Emissions (g/day)", e.co_g_day, p.co_g_day, 0, metric_key::kCo},
      {"CO2 Emissions (g/day)", e.co2_g_day, p.co2_g_day, 0, metric_key::kCo2},
      {"NOx Emissions (g/day)", e.nox_g_day, p.nox_g_day, 0, metric_key::kNox},
  };
}

inline std::string percent_cell(const ComparisonReport& r, const char* key) {
  return key == nullptr ? "-" : text::format_fixed(r.improvement(key), 1) + "%";
}

}  // namespace detail

inline void write_report(const ComparisonReport& r, ReportFormat format, std::ostream& out) {
  const auto rows = detail::report_rows(r);
  if (format == ReportFormat::kTable) {
    out << "Scenario," << r.existing.name << ',' << r.proposed.name << ",% Improvement\n";
    for (const auto& row : rows) {
      out << row.label << ',' << text::format_fixed(row.existing, row.decimals) << ','
          << text::format_fixed(row.proposed, row.decimals) << ',' << detail::percent_cell(r, row.improvement_key)
          << '\n';
    }
    return;
  }
  out << "Scenario comparison: " << r.existing.name << " vs " << r.proposed.name << "\n\n";
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, std::string_view(row.label).size());
  for (const auto& row : rows) {
    std::string label(row.label);
    label.resize(width, ' ');
    out << "  " << label << "  " << text::format_fixed(row.existing, row.decimals) << " -> "
        << text::format_fixed(row.proposed, row.decimals);
    if (row.improvement_key != nullptr) {
      const double pct = r.improvement(row.improvement_key);
      out << "  (" << (pct >= 0.0 ? "improved " : "worse by ") << text::format_fixed(std::abs(pct), 1) << "%)";
    }
    out << '\n';
  }
}

inline std::string format_report(const ComparisonReport& r, ReportFormat format) {
  std::ostringstream out;
  write_report(r, format, out);
  return out.str();
}

}  // namespace wastecollect
