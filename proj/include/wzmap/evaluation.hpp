#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wzmap/gridmap.hpp"
#include "wzmap/planner.hpp"
#include "wzmap/vehicle_sim.hpp"
#include "wzmap/workzone.hpp"

namespace wzmap {

struct ClearanceSample {
  double t = 0.0;
  double x = 0.0;
  double cone_distance = 0.0;
  double boundary_distance = 0.0;
};

struct ClearanceReport {
  // Closest approach of either vehicle edge to the channelizing cone line;
  // +infinity when the layout has no cones.
  double min_cone_distance = 0.0;
  // Closest approach of either vehicle edge to the outer shoulder edge.
  double min_boundary_distance = 0.0;
  // max - min of each series while the rear axle is inside the activity
  // area's longitudinal span.
  double cone_fluctuation = 0.0;
  double boundary_fluctuation = 0.0;
  int activity_samples = 0;
  std::vector<ClearanceSample> series;
};

// Throws Error(kEmptyTrace).
ClearanceReport Clearance(const Trace& trace, const WorkZoneLayout& layout,
                          double vehicle_width);

// True iff any pose lies inside the closed region.
bool RuleViolation(const std::vector<Eigen::Vector2d>& positions,
                   const WorkZoneLayout& layout);
bool RuleViolation(const ReferencePath& path, const WorkZoneLayout& layout);
bool RuleViolation(const Trace& trace, const WorkZoneLayout& layout);

struct EvaluationParams {
  double vehicle_width = 1.85;
  double fluctuation_bound = 0.5;
};

struct EvaluationReport {
  double precision = 0.0;
  double benchmark_precision = 0.0;
  ClearanceReport clearance;
  bool benchmark_violates = false;
  bool crowdsourced_violates = false;
  bool fluctuation_within_bound = false;
  double fluctuation_bound = 0.0;
  bool trace_completed = false;
};

// Grids must share a frame. Precision is computed on the raw (uninflated)
// grids against `truth`.
EvaluationReport EvaluateScenario(const OccupancyGrid& crowd_grid,
                                  const OccupancyGrid& bench_grid,
                                  const OccupancyGrid& truth_grid,
                                  const ReferencePath& crowd_path,
                                  const ReferencePath& bench_path, const Trace& crowd_trace,
                                  const WorkZoneLayout& layout,
                                  const EvaluationParams& params);

void to_json(nlohmann::json& j, const ClearanceReport& report);
void from_json(const nlohmann::json& j, ClearanceReport& report);
void to_json(nlohmann::json& j, const EvaluationReport& report);
void from_json(const nlohmann::json& j, EvaluationReport& report);

// CSV `t,x,cone_distance,boundary_distance` (empty field for infinity).
void SaveClearanceCsv(const ClearanceReport& report, const std::filesystem::path& file);

}  // namespace wzmap
