#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "wzmap/geometry.hpp"

namespace wzmap::internal {

inline nlohmann::json PointToJson(const Eigen::Vector2d& p) {
  return nlohmann::json::array({p.x(), p.y()});
}

inline Eigen::Vector2d PointFromJson(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json PointsToJson(const std::vector<Eigen::Vector2d>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pts) out.push_back(PointToJson(p));
  return out;
}

inline std::vector<Eigen::Vector2d> PointsFromJson(const nlohmann::json& j) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(PointFromJson(p));
  return out;
}

inline nlohmann::json BoxToJson(const Box& box) {
  return {{"min", PointToJson(box.min())}, {"max", PointToJson(box.max())}};
}

inline Box BoxFromJson(const nlohmann::json& j) {
  return Box(PointFromJson(j.at("min")), PointFromJson(j.at("max")));
}

// JSON has no infinity; non-finite values are written as null.
inline nlohmann::json FiniteOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline double FiniteOrInf(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace wzmap::internal
