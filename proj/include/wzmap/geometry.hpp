#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wzmap {

using Polyline = std::vector<Eigen::Vector2d>;
using Polygon = std::vector<Eigen::Vector2d>;
using Box = Eigen::AlignedBox2d;

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into (-pi, pi].
inline double NormalizeAngle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline double DegToRad(double deg) { return deg * kPi / 180.0; }

// Even-odd crossing test. Points exactly on an edge may land on either side.
bool PointInPolygon(const Polygon& polygon, const Eigen::Vector2d& p);

double DistanceToSegment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b);

// Distance to the nearest point of an open polyline. A single-vertex polyline
// degenerates to point distance; an empty one returns +infinity.
double DistanceToPolyline(const Polyline& line, const Eigen::Vector2d& p);

// True if the closed segments [a,b] and [c,d] share at least one point.
bool SegmentsIntersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c, const Eigen::Vector2d& d);

// Checks that no two non-adjacent edges of the closed polygon touch.
bool IsSimplePolygon(const Polygon& polygon);

// True if the segment touches the closed box.
bool SegmentIntersectsBox(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          const Box& box);

double PolylineLength(const Polyline& line);

}  // namespace wzmap
