#pragma once

#include <nlohmann/json.hpp>

#include "wzmap/geometry.hpp"
#include "wzmap/gridmap.hpp"

namespace wzmap {

inline constexpr double kMetersPerFoot = 0.3048;

constexpr double FtToM(double feet) { return feet * kMetersPerFoot; }

// Work-zone parameters in US customary units. Lanes are indexed from the
// right; traffic in the closed lane shifts one lane to the left.
struct WorkZoneSpec {
  double speed_limit_mph = 60.0;
  double lane_width_ft = 12.0;
  int n_lanes = 3;
  double shoulder_width_ft = 8.0;
  int closed_lane_index = 0;
  double cone_spacing_ft = 40.0;
  double activity_length_ft = 650.0;
  double activity_width_ft = 36.0;
  // Open road before the first and after the last taper.
  double approach_length_ft = 330.0;
  // Channelizing line sits this far inside the closed lane.
  double cone_offset_ft = 2.0;

  // Throws Error(kInvalidSpec).
  void Validate() const;
};

// MUTCD taper lengths in feet.
double MergingTaperFt(const WorkZoneSpec& spec);
double ShiftingTaperFt(const WorkZoneSpec& spec);
double ShoulderTaperFt(const WorkZoneSpec& spec);

// Road frame: x runs along the direction of travel from 0 to road_length, y
// points left with y = 0 on the outer edge of the right shoulder.
struct WorkZoneLayout {
  WorkZoneSpec spec;

  double merging_taper = 0.0;
  double shifting_taper = 0.0;
  double shoulder_taper = 0.0;
  Box activity_area;

  Polyline cone_line;  // channelizing line, in travel order
  std::vector<Eigen::Vector2d> cones;
  std::vector<Polyline> lane_boundaries;  // right to left
  Polygon drivable_polygon;
  Polygon closed_region;
  Polyline road_boundary;  // outer shoulder edge

  double road_length = 0.0;
  double road_width = 0.0;        // shoulder + lanes
  double closure_start = 0.0;     // x where the closed lane stops being legal
  double closure_end = 0.0;
  double closed_lane_center = 0.0;
  double open_lane_center = 0.0;

  // Road extent padded by `margin` on all sides.
  Box Bounds(double margin) const;
};

WorkZoneLayout BuildLayout(const WorkZoneSpec& spec);

// Free iff the cell centre lies inside the drivable polygon.
OccupancyGrid GroundTruthGrid(const WorkZoneLayout& layout, const Box& bounds,
                              double resolution);

void to_json(nlohmann::json& j, const WorkZoneSpec& spec);
void from_json(const nlohmann::json& j, WorkZoneSpec& spec);
void to_json(nlohmann::json& j, const WorkZoneLayout& layout);
void from_json(const nlohmann::json& j, WorkZoneLayout& layout);

}  // namespace wzmap
