#include "wzmap/workzone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json_util.hpp"
#include "wzmap/error.hpp"

namespace wzmap {

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, "invalid work zone spec: " + what);
}

// Evenly spaced cones along each segment. Spacing is measured along the road
// (x) so a taper of length L gets ceil(L / spacing) + 1 cones. Shared
// vertices are emitted once.
std::vector<Eigen::Vector2d> PlaceCones(const Polyline& line, double spacing) {
  std::vector<Eigen::Vector2d> cones;
  if (line.empty()) return cones;
  cones.push_back(line.front());
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Eigen::Vector2d& a = line[i];
    const Eigen::Vector2d& b = line[i + 1];
    const double len = std::abs(b.x() - a.x()) > 0.0 ? std::abs(b.x() - a.x())
                                                     : (b - a).norm();
    if (len == 0.0) continue;
    const int segments =
        std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    for (int k = 1; k <= segments; ++k) {
      cones.push_back(a + (b - a) * (static_cast<double>(k) / segments));
    }
  }
  return cones;
}

}  // namespace

void WorkZoneSpec::Validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  Require(finite(speed_limit_mph) && speed_limit_mph > 0, "speed_limit must be > 0");
  Require(finite(lane_width_ft) && lane_width_ft > 0, "lane_width must be > 0");
  Require(n_lanes >= 2, "n_lanes must be >= 2");
  Require(finite(shoulder_width_ft) && shoulder_width_ft >= 0,
          "shoulder_width must be >= 0");
  Require(closed_lane_index >= 0 && closed_lane_index < n_lanes,
          "closed_lane_index out of range");
  Require(closed_lane_index <= n_lanes - 2,
          "closed_lane_index out of range: no open lane to the left of the "
          "closed lane");
  Require(finite(cone_spacing_ft) && cone_spacing_ft > 0, "cone_spacing must be > 0");
  Require(finite(activity_length_ft) && activity_length_ft > 0,
          "activity_length must be > 0");
  Require(finite(activity_width_ft) && activity_width_ft > 0,
          "activity_width must be > 0");
  Require(finite(approach_length_ft) && approach_length_ft > 0,
          "approach_length must be > 0");
  Require(finite(cone_offset_ft) && cone_offset_ft > 0 &&
              cone_offset_ft < lane_width_ft / 2,
          "cone_offset must be in (0, lane_width/2)");
}

double MergingTaperFt(const WorkZoneSpec& spec) {
  // MUTCD: L = W*S for S >= 45 mph, L = W*S^2/60 below.
  const double w = spec.lane_width_ft;
  const double s = spec.speed_limit_mph;
  return s >= 45.0 ? w * s : w * s * s / 60.0;
}

double ShiftingTaperFt(const WorkZoneSpec& spec) { return MergingTaperFt(spec) / 2.0; }

double ShoulderTaperFt(const WorkZoneSpec& spec) {
  return std::round(MergingTaperFt(spec) / 3.0);
}

Box WorkZoneLayout::Bounds(double margin) const {
  return Box(Eigen::Vector2d(-margin, -margin),
             Eigen::Vector2d(road_length + margin, road_width + margin));
}

WorkZoneLayout BuildLayout(const WorkZoneSpec& spec) {
  spec.Validate();
  WorkZoneLayout layout;
  layout.spec = spec;
  layout.merging_taper = FtToM(MergingTaperFt(spec));
  layout.shifting_taper = FtToM(ShiftingTaperFt(spec));
  layout.shoulder_taper = FtToM(ShoulderTaperFt(spec));

  const double lane = FtToM(spec.lane_width_ft);
  const double shoulder = FtToM(spec.shoulder_width_ft);
  const double offset = FtToM(spec.cone_offset_ft);
  const double approach = FtToM(spec.approach_length_ft);
  const int c = spec.closed_lane_index;

  const double y_lo = shoulder + c * lane;  // right edge of the closed lane
  const double y_hi = y_lo + lane;          // left edge of the closed lane
  const double y_out = (c == 0) ? 0.0 : y_lo;
  const bool shoulder_taper = (c == 0) && shoulder > offset;

  const double lead = shoulder_taper ? layout.shoulder_taper : 0.0;
  const double x_close0 = approach + lead;
  const double x_act0 = x_close0 + layout.merging_taper;
  const double x_act1 = x_act0 + FtToM(spec.activity_length_ft);
  const double x_close1 = x_act1 + layout.shifting_taper;
  layout.road_length = x_close1 + lead + approach;
  layout.road_width = shoulder + spec.n_lanes * lane;
  layout.closure_start = x_close0 - offset;
  layout.closure_end = x_close1 + offset;
  layout.closed_lane_center = y_lo + lane / 2.0;
  layout.open_lane_center = y_hi + lane / 2.0;

  const double y_cone = y_hi - offset;
  const double y_taper_end = shoulder_taper ? shoulder - offset : y_lo + offset;
  Polyline& line = layout.cone_line;
  if (shoulder_taper) line.emplace_back(approach, 0.0);
  line.emplace_back(x_close0, y_taper_end);
  line.emplace_back(x_act0, y_cone);
  line.emplace_back(x_act1, y_cone);
  line.emplace_back(x_close1, y_taper_end);
  if (shoulder_taper) line.emplace_back(x_close1 + layout.shoulder_taper, 0.0);
  layout.cones = PlaceCones(line, FtToM(spec.cone_spacing_ft));

  const double act_width = std::min(FtToM(spec.activity_width_ft), y_hi - y_out);
  layout.activity_area =
      Box(Eigen::Vector2d(x_act0, y_hi - act_width), Eigen::Vector2d(x_act1, y_hi));

  for (int i = 0; i <= spec.n_lanes; ++i) {
    const double y = shoulder + i * lane;
    layout.lane_boundaries.push_back(
        {Eigen::Vector2d(0.0, y), Eigen::Vector2d(layout.road_length, y)});
  }
  layout.road_boundary = {Eigen::Vector2d(0.0, 0.0),
                          Eigen::Vector2d(layout.road_length, 0.0)};

  const double xs = layout.closure_start;
  const double xe = layout.closure_end;
  layout.drivable_polygon = {
      {0.0, y_lo}, {xs, y_lo}, {xs, y_hi}, {xe, y_hi}, {xe, y_lo},
      {layout.road_length, y_lo}, {layout.road_length, layout.road_width},
      {0.0, layout.road_width}};

  if (shoulder_taper) {
    // Follow the shoulder tapers down to the road edge.
    const double frac = (layout.shoulder_taper - offset) / layout.shoulder_taper;
    const double y_edge = y_taper_end * frac;
    layout.closed_region = {{approach, 0.0},
                            {xs, y_edge},
                            {xs, y_hi},
                            {xe, y_hi},
                            {xe, y_edge},
                            {x_close1 + layout.shoulder_taper, 0.0}};
  } else {
    layout.closed_region = {{xs, y_out}, {xe, y_out}, {xe, y_hi}, {xs, y_hi}};
  }
  return layout;
}

OccupancyGrid GroundTruthGrid(const WorkZoneLayout& layout, const Box& bounds,
                              double resolution) {
  OccupancyGrid grid = OccupancyGrid::FromBounds(bounds, resolution);
  Box poly_box;
  for (const auto& v : layout.drivable_polygon) poly_box.extend(v);
  for (int row = 0; row < grid.height(); ++row) {
    for (int col = 0; col < grid.width(); ++col) {
      const Eigen::Vector2d c = grid.CellCenter(col, row);
      if (!poly_box.contains(c)) continue;
      if (PointInPolygon(layout.drivable_polygon, c)) {
        grid.set(col, row, OccupancyGrid::kFree);
      }
    }
  }
  return grid;
}

void to_json(nlohmann::json& j, const WorkZoneSpec& s) {
  j = {{"speed_limit_mph", s.speed_limit_mph},
       {"lane_width_ft", s.lane_width_ft},
       {"n_lanes", s.n_lanes},
       {"shoulder_width_ft", s.shoulder_width_ft},
       {"closed_lane_index", s.closed_lane_index},
       {"cone_spacing_ft", s.cone_spacing_ft},
       {"activity_length_ft", s.activity_length_ft},
       {"activity_width_ft", s.activity_width_ft},
       {"approach_length_ft", s.approach_length_ft},
       {"cone_offset_ft", s.cone_offset_ft}};
}

void from_json(const nlohmann::json& j, WorkZoneSpec& s) {
  j.at("speed_limit_mph").get_to(s.speed_limit_mph);
  j.at("lane_width_ft").get_to(s.lane_width_ft);
  j.at("n_lanes").get_to(s.n_lanes);
  j.at("shoulder_width_ft").get_to(s.shoulder_width_ft);
  j.at("closed_lane_index").get_to(s.closed_lane_index);
  j.at("cone_spacing_ft").get_to(s.cone_spacing_ft);
  j.at("activity_length_ft").get_to(s.activity_length_ft);
  j.at("activity_width_ft").get_to(s.activity_width_ft);
  j.at("approach_length_ft").get_to(s.approach_length_ft);
  j.at("cone_offset_ft").get_to(s.cone_offset_ft);
}

void to_json(nlohmann::json& j, const WorkZoneLayout& l) {
  using internal::BoxToJson;
  using internal::PointsToJson;
  nlohmann::json lanes = nlohmann::json::array();
  for (const auto& b : l.lane_boundaries) lanes.push_back(PointsToJson(b));
  j = {{"spec", l.spec},
       {"merging_taper_m", l.merging_taper},
       {"shifting_taper_m", l.shifting_taper},
       {"shoulder_taper_m", l.shoulder_taper},
       {"activity_area", BoxToJson(l.activity_area)},
       {"cone_line", PointsToJson(l.cone_line)},
       {"cones", PointsToJson(l.cones)},
       {"lane_boundaries", lanes},
       {"drivable_polygon", PointsToJson(l.drivable_polygon)},
       {"closed_region", PointsToJson(l.closed_region)},
       {"road_boundary", PointsToJson(l.road_boundary)},
       {"road_length_m", l.road_length},
       {"road_width_m", l.road_width},
       {"closure_start_m", l.closure_start},
       {"closure_end_m", l.closure_end},
       {"closed_lane_center_m", l.closed_lane_center},
       {"open_lane_center_m", l.open_lane_center}};
}

void from_json(const nlohmann::json& j, WorkZoneLayout& l) {
  using internal::BoxFromJson;
  using internal::PointsFromJson;
  j.at("spec").get_to(l.spec);
  j.at("merging_taper_m").get_to(l.merging_taper);
  j.at("shifting_taper_m").get_to(l.shifting_taper);
  j.at("shoulder_taper_m").get_to(l.shoulder_taper);
  l.activity_area = BoxFromJson(j.at("activity_area"));
  l.cone_line = PointsFromJson(j.at("cone_line"));
  l.cones = PointsFromJson(j.at("cones"));
  l.lane_boundaries.clear();
  for (const auto& b : j.at("lane_boundaries")) {
    l.lane_boundaries.push_back(PointsFromJson(b));
  }
  l.drivable_polygon = PointsFromJson(j.at("drivable_polygon"));
  l.closed_region = PointsFromJson(j.at("closed_region"));
  l.road_boundary = PointsFromJson(j.at("road_boundary"));
  j.at("road_length_m").get_to(l.road_length);
  j.at("road_width_m").get_to(l.road_width);
  j.at("closure_start_m").get_to(l.closure_start);
  j.at("closure_end_m").get_to(l.closure_end);
  j.at("closed_lane_center_m").get_to(l.closed_lane_center);
  j.at("open_lane_center_m").get_to(l.open_lane_center);
}

}  // namespace wzmap
