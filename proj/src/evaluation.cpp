#include "wzmap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "wzmap/error.hpp"

namespace wzmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ConeDistance(const WorkZoneLayout& layout, const Eigen::Vector2d& p) {
  if (layout.cones.empty()) return kInf;
  if (!layout.cone_line.empty()) return DistanceToPolyline(layout.cone_line, p);
  double best = kInf;
  for (const auto& c : layout.cones) best = std::min(best, (c - p).norm());
  return best;
}

double Spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) return 0.0;
  return *hi - *lo;
}

}  // namespace

ClearanceReport Clearance(const Trace& trace, const WorkZoneLayout& layout,
                          double vehicle_width) {
  if (trace.entries.empty()) throw Error(ErrorCode::kEmptyTrace, "clearance of an empty trace");
  ClearanceReport report;
  report.min_cone_distance = kInf;
  report.min_boundary_distance = kInf;
  const double half = vehicle_width / 2.0;
  const double act_lo = layout.activity_area.min().x();
  const double act_hi = layout.activity_area.max().x();
  std::vector<double> cone_in_span;
  std::vector<double> boundary_in_span;
  for (const auto& e : trace.entries) {
    const Eigen::Vector2d p(e.state.x, e.state.y);
    const Eigen::Vector2d n(-std::sin(e.state.heading), std::cos(e.state.heading));
    const Eigen::Vector2d left = p + half * n;
    const Eigen::Vector2d right = p - half * n;
    ClearanceSample s;
    s.t = e.t;
    s.x = p.x();
    s.cone_distance = std::min(ConeDistance(layout, left), ConeDistance(layout, right));
    s.boundary_distance = std::min(DistanceToPolyline(layout.road_boundary, left),
                                   DistanceToPolyline(layout.road_boundary, right));
    report.min_cone_distance = std::min(report.min_cone_distance, s.cone_distance);
    report.min_boundary_distance = std::min(report.min_boundary_distance, s.boundary_distance);
    if (p.x() >= act_lo && p.x() <= act_hi) {
      cone_in_span.push_back(s.cone_distance);
      boundary_in_span.push_back(s.boundary_distance);
    }
    report.series.push_back(s);
  }
  report.cone_fluctuation = Spread(cone_in_span);
  report.boundary_fluctuation = Spread(boundary_in_span);
  report.activity_samples = static_cast<int>(cone_in_span.size());
  return report;
}

bool RuleViolation(const std::vector<Eigen::Vector2d>& positions,
                   const WorkZoneLayout& layout) {
  for (const auto& p : positions) {
    if (PointInPolygon(layout.closed_region, p)) return true;
  }
  return false;
}

bool RuleViolation(const ReferencePath& path, const WorkZoneLayout& layout) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(path.poses.size());
  for (const auto& p : path.poses) pts.push_back(p.position());
  return RuleViolation(pts, layout);
}

bool RuleViolation(const Trace& trace, const WorkZoneLayout& layout) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(trace.entries.size());
  for (const auto& e : trace.entries) pts.emplace_back(e.state.x, e.state.y);
  return RuleViolation(pts, layout);
}

EvaluationReport EvaluateScenario(const OccupancyGrid& crowd_grid,
                                  const OccupancyGrid& bench_grid,
                                  const OccupancyGrid& truth_grid,
                                  const ReferencePath& crowd_path,
                                  const ReferencePath& bench_path, const Trace& crowd_trace,
                                  const WorkZoneLayout& layout,
                                  const EvaluationParams& params) {
  EvaluationReport report;
  report.precision = Precision(crowd_grid, truth_grid);
  report.benchmark_precision = Precision(bench_grid, truth_grid);
  report.clearance = Clearance(crowd_trace, layout, params.vehicle_width);
  report.crowdsourced_violates = RuleViolation(crowd_path, layout);
  report.benchmark_violates = RuleViolation(bench_path, layout);
  report.fluctuation_bound = params.fluctuation_bound;
  report.fluctuation_within_bound =
      report.clearance.cone_fluctuation <= params.fluctuation_bound;
  report.trace_completed = crowd_trace.completed;
  return report;
}

void to_json(nlohmann::json& j, const ClearanceReport& r) {
  using internal::FiniteOrNull;
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : r.series) {
    series.push_back({s.t, s.x, FiniteOrNull(s.cone_distance),
                      FiniteOrNull(s.boundary_distance)});
  }
  j = {{"min_cone_distance_m", FiniteOrNull(r.min_cone_distance)},
       {"min_boundary_distance_m", FiniteOrNull(r.min_boundary_distance)},
       {"cone_fluctuation_m", r.cone_fluctuation},
       {"boundary_fluctuation_m", r.boundary_fluctuation},
       {"activity_samples", r.activity_samples},
       {"series_columns", {"t", "x", "cone_distance", "boundary_distance"}},
       {"series", series}};
}

void from_json(const nlohmann::json& j, ClearanceReport& r) {
  using internal::FiniteOrInf;
  r.min_cone_distance = FiniteOrInf(j.at("min_cone_distance_m"));
  r.min_boundary_distance = FiniteOrInf(j.at("min_boundary_distance_m"));
  j.at("cone_fluctuation_m").get_to(r.cone_fluctuation);
  j.at("boundary_fluctuation_m").get_to(r.boundary_fluctuation);
  j.at("activity_samples").get_to(r.activity_samples);
  r.series.clear();
  for (const auto& row : j.at("series")) {
    r.series.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                        FiniteOrInf(row.at(2)), FiniteOrInf(row.at(3))});
  }
}

void to_json(nlohmann::json& j, const EvaluationReport& r) {
  j = {{"precision", r.precision},
       {"benchmark_precision", r.benchmark_precision},
       {"crowdsourced_violates", r.crowdsourced_violates},
       {"benchmark_violates", r.benchmark_violates},
       {"fluctuation_bound_m", r.fluctuation_bound},
       {"fluctuation_within_bound", r.fluctuation_within_bound},
       {"trace_completed", r.trace_completed},
       {"clearance", r.clearance}};
}

void from_json(const nlohmann::json& j, EvaluationReport& r) {
  j.at("precision").get_to(r.precision);
  j.at("benchmark_precision").get_to(r.benchmark_precision);
  j.at("crowdsourced_violates").get_to(r.crowdsourced_violates);
  j.at("benchmark_violates").get_to(r.benchmark_violates);
  j.at("fluctuation_bound_m").get_to(r.fluctuation_bound);
  j.at("fluctuation_within_bound").get_to(r.fluctuation_within_bound);
  j.at("trace_completed").get_to(r.trace_completed);
  j.at("clearance").get_to(r.clearance);
}

void SaveClearanceCsv(const ClearanceReport& report, const std::filesystem::path& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (f == nullptr) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  std::fputs("t,x,cone_distance,boundary_distance\n", f);
  auto field = [](double v) {
    char buf[64] = "";
    if (std::isfinite(v)) std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& s : report.series) {
    std::fprintf(f, "%.4f,%.6f,%s,%s\n", s.t, s.x, field(s.cone_distance).c_str(),
                 field(s.boundary_distance).c_str());
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::kIoError, "failed writing " + file.string());
}

}  // namespace wzmap
