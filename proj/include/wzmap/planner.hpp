#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "wzmap/gridmap.hpp"

namespace wzmap {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]

  Eigen::Vector2d position() const { return {x, y}; }
};

struct ReferencePath {
  std::vector<Pose> poses;
  double arc_step = 0.0;

  double Length() const;
};

struct PlannerParams {
  double r_min = 8.0;
  // Lower bound; see EffectiveHeadingBins.
  int heading_bins = 72;
  // Extra cost per metre driven on a turning primitive.
  double turn_penalty = 0.05;
  // Flat cost for switching between left, straight and right.
  double steer_change_penalty = 0.02;
  double goal_tolerance = 0.5;           // m
  double goal_heading_tolerance = 10.0;  // deg
  long max_expansions = 20'000'000;
  // Points checked along each primitive, end point included.
  int collision_samples = 4;
};

// Row-major (row = grid row) field of 8-connected obstacle-aware distances in
// metres from each cell centre to the goal cell centre. Diagonal moves may not
// cut the corner of an occupied cell. Unreachable cells hold +infinity.
using CostField =
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Throws Error(kGoalOccupied) if the goal is not in a free cell.
CostField HolonomicHeuristic(const OccupancyGrid& grid, const Eigen::Vector2d& goal);

struct PlanStats {
  long expansions = 0;
  // Expanded pose with the smallest heuristic; useful when no path is found.
  Pose closest;
  double closest_h = 0.0;
};

// Heading bins actually used by the search: at least `heading_bins`, and fine
// enough that a single turning primitive moves the heading by a full bin.
// Coarser bins would merge a turning child with its straight sibling.
int EffectiveHeadingBins(const PlannerParams& params, double resolution);

// Forward-only Hybrid A*: primitives {left at r_min, straight, right at
// r_min}, each one grid diagonal long. Throws Error(kStartOrGoalOccupied) or
// Error(kNoPath).
ReferencePath HybridAStar(const OccupancyGrid& grid, const Pose& start, const Pose& goal,
                          const PlannerParams& params, PlanStats* stats = nullptr);

// Uniform chord-length resampling; endpoints preserved, heading interpolated
// along the shorter arc. Throws Error(kEmptyPath).
ReferencePath Resample(const ReferencePath& path, double step);

// CSV `s,x,y,heading`.
void SavePathCsv(const ReferencePath& path, const std::filesystem::path& file);
ReferencePath LoadPathCsv(const std::filesystem::path& file);

}  // namespace wzmap
