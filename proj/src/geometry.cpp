#include "wzmap/geometry.hpp"

#include <algorithm>
#include <limits>

#include "wzmap/error.hpp"

namespace wzmap {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "invalid-spec";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kEmptyData: return "empty-data";
    case ErrorCode::kDegenerateData: return "degenerate-data";
    case ErrorCode::kSingularCovariance: return "singular-covariance";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kNoPredictedFree: return "no-predicted-free";
    case ErrorCode::kGoalOccupied: return "goal-occupied";
    case ErrorCode::kStartOrGoalOccupied: return "start-or-goal-occupied";
    case ErrorCode::kNoPath: return "no-path";
    case ErrorCode::kEmptyPath: return "empty-path";
    case ErrorCode::kEmptyTrace: return "empty-trace";
    case ErrorCode::kConfigParse: return "config-parse";
    case ErrorCode::kMissingArtifact: return "missing-artifact";
  }
  return "unknown";
}

bool PointInPolygon(const Polygon& polygon, const Eigen::Vector2d& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross =
          a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

double DistanceToSegment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double DistanceToPolyline(const Polyline& line, const Eigen::Vector2d& p) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return (p - line.front()).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, DistanceToSegment(p, line[i], line[i + 1]));
  }
  return best;
}

namespace {

double Cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
             const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool OnSegment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
               const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

bool SegmentsIntersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  const int d1 = Sign(Cross(c, d, a));
  const int d2 = Sign(Cross(c, d, b));
  const int d3 = Sign(Cross(a, b, c));
  const int d4 = Sign(Cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && OnSegment(c, d, a)) return true;
  if (d2 == 0 && OnSegment(c, d, b)) return true;
  if (d3 == 0 && OnSegment(a, b, c)) return true;
  if (d4 == 0 && OnSegment(a, b, d)) return true;
  return false;
}

bool IsSimplePolygon(const Polygon& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i2 = (i + 1) % n;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t j2 = (j + 1) % n;
      const bool adjacent = (j == i2) || (i == j2);
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject folds.
        const Eigen::Vector2d& shared = (j == i2) ? polygon[i2] : polygon[i];
        const Eigen::Vector2d& p = (j == i2) ? polygon[i] : polygon[i2];
        const Eigen::Vector2d& q = (j == i2) ? polygon[j2] : polygon[j];
        if (Cross(shared, p, q) == 0.0 && (p - shared).dot(q - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (SegmentsIntersect(polygon[i], polygon[i2], polygon[j], polygon[j2])) {
        return false;
      }
    }
  }
  return true;
}

bool SegmentIntersectsBox(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          const Box& box) {
  // Liang-Barsky clipping against the closed box.
  double t0 = 0.0;
  double t1 = 1.0;
  const Eigen::Vector2d d = b - a;
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = box.min()(axis);
    const double hi = box.max()(axis);
    if (d(axis) == 0.0) {
      if (a(axis) < lo || a(axis) > hi) return false;
      continue;
    }
    double ta = (lo - a(axis)) / d(axis);
    double tb = (hi - a(axis)) / d(axis);
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double PolylineLength(const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    total += (line[i + 1] - line[i]).norm();
  }
  return total;
}

}  // namespace wzmap
