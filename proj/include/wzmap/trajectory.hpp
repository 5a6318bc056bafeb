#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wzmap/workzone.hpp"

namespace wzmap {

// Unordered 2D points, one per row.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct TimedPoint {
  double t = 0.0;
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
};

struct Trajectory {
  std::string vehicle_id;
  std::vector<TimedPoint> points;  // strictly increasing t
};

struct SynthesisParams {
  int n = 30;
  double lateral_sigma = 0.3;  // m, clipped at 2 sigma
  double step = 2.0;           // arc length between samples (m)
  double speed = 10.0;         // used to stamp t = s / speed
  std::uint64_t seed = 7;
  // Distance before the closure at which the lane change is complete.
  double merge_lead = 10.0;
};

// Nominal path: closed-lane centre, cosine ramp into the neighbouring lane
// that finishes `merge_lead` before the closure, back again after it. The
// ramp length is the shifting taper length.
double NominalLateral(const WorkZoneLayout& layout, double merge_lead, double x);

std::vector<Trajectory> Synthesize(const WorkZoneLayout& layout,
                                   const SynthesisParams& params);

// CSV with header `vehicle_id,t,x,y`. Rows are written sorted by (id, t).
void SaveTrajectoriesCsv(const std::vector<Trajectory>& trajectories,
                         const std::filesystem::path& path);
// Throws Error(kParseError) naming the 1-based line, Error(kIoError) when the
// file cannot be opened. Trajectories come back sorted by vehicle id.
std::vector<Trajectory> LoadTrajectoriesCsv(const std::filesystem::path& path);

PointSet Flatten(const std::vector<Trajectory>& trajectories);

}  // namespace wzmap
