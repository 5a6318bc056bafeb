#include "wzmap/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string_view>

#include "wzmap/error.hpp"

namespace wzmap {

namespace {

// 0 before a, 1 after b, half-cosine in between.
double CosineRamp(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return 0.5 - 0.5 * std::cos(kPi * (x - a) / (b - a));
}

}  // namespace

double NominalLateral(const WorkZoneLayout& layout, double merge_lead, double x) {
  const double shift = layout.open_lane_center - layout.closed_lane_center;
  const double ramp = layout.shifting_taper;
  const double up_end = std::max(layout.closure_start - merge_lead, 0.0);
  const double up_start = std::max(up_end - ramp, 0.0);
  const double down_start = std::min(layout.closure_end + merge_lead, layout.road_length);
  const double down_end = std::min(down_start + ramp, layout.road_length);
  const double w = CosineRamp(x, up_start, up_end) - CosineRamp(x, down_start, down_end);
  return layout.closed_lane_center + shift * w;
}

std::vector<Trajectory> Synthesize(const WorkZoneLayout& layout,
                                   const SynthesisParams& params) {
  if (params.n < 0 || !(params.step > 0.0) || !(params.lateral_sigma >= 0.0) ||
      !(params.speed > 0.0)) {
    throw Error(ErrorCode::kInvalidSpec,
                "synthesis needs n >= 0, step > 0, sigma >= 0, speed > 0");
  }
  std::vector<Trajectory> out;
  if (params.n == 0) return out;

  // Dense nominal polyline with cumulative arc length and unit normals.
  const double dx = std::min(0.1, params.step / 4.0);
  const int n_dense = static_cast<int>(std::ceil(layout.road_length / dx));
  std::vector<Eigen::Vector2d> dense(n_dense + 1);
  std::vector<double> arc(n_dense + 1, 0.0);
  for (int i = 0; i <= n_dense; ++i) {
    const double x = std::min(i * dx, layout.road_length);
    dense[i] = {x, NominalLateral(layout, params.merge_lead, x)};
    if (i > 0) arc[i] = arc[i - 1] + (dense[i] - dense[i - 1]).norm();
  }
  const double total = arc.back();

  std::vector<double> stations;
  for (double s = 0.0; s <= total + 1e-9; s += params.step) stations.push_back(s);
  if (total - stations.back() >= 0.5 * params.step) stations.push_back(total);

  std::vector<Eigen::Vector2d> base(stations.size());
  std::vector<Eigen::Vector2d> normal(stations.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double s = stations[i];
    while (seg + 2 < dense.size() && arc[seg + 1] < s) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double u = len > 0.0 ? std::clamp((s - arc[seg]) / len, 0.0, 1.0) : 0.0;
    base[i] = dense[seg] + u * (dense[seg + 1] - dense[seg]);
    const Eigen::Vector2d tangent = (dense[seg + 1] - dense[seg]).normalized();
    normal[i] = {-tangent.y(), tangent.x()};
  }

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double clip = 2.0 * params.lateral_sigma;
  out.reserve(params.n);
  for (int v = 0; v < params.n; ++v) {
    Trajectory traj;
    char id[32];
    std::snprintf(id, sizeof(id), "veh_%03d", v);
    traj.vehicle_id = id;
    traj.points.reserve(stations.size());
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const double offset =
          std::clamp(params.lateral_sigma * noise(rng), -clip, clip);
      traj.points.push_back({stations[i] / params.speed, base[i] + offset * normal[i]});
    }
    out.push_back(std::move(traj));
  }
  return out;
}

void SaveTrajectoriesCsv(const std::vector<Trajectory>& trajectories,
                         const std::filesystem::path& path) {
  std::vector<const Trajectory*> order;
  for (const auto& t : trajectories) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Trajectory* a, const Trajectory* b) {
    return a->vehicle_id < b->vehicle_id;
  });

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  std::fputs("vehicle_id,t,x,y\n", f);
  for (const Trajectory* traj : order) {
    std::vector<TimedPoint> pts = traj->points;
    std::stable_sort(pts.begin(), pts.end(),
                     [](const TimedPoint& a, const TimedPoint& b) { return a.t < b.t; });
    for (const auto& p : pts) {
      std::fprintf(f, "%s,%.6f,%.6f,%.6f\n", traj->vehicle_id.c_str(), p.t, p.p.x(),
                   p.p.y());
    }
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool ParseDouble(std::string_view s, double& v) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && end == s.data() + s.size() && std::isfinite(v);
}

}  // namespace

std::vector<Trajectory> LoadTrajectoriesCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  auto fail = [&](int line_no, const std::string& what) {
    throw Error(ErrorCode::kParseError,
                path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  std::map<std::string, Trajectory> by_id;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "vehicle_id,t,x,y") fail(line_no, "expected header vehicle_id,t,x,y");
      continue;
    }
    const auto fields = SplitCommas(line);
    if (fields.size() != 4) {
      fail(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(line_no, "empty vehicle_id");
    TimedPoint pt;
    double x = 0.0;
    double y = 0.0;
    if (!ParseDouble(fields[1], pt.t)) fail(line_no, "bad t '" + std::string(fields[1]) + "'");
    if (!ParseDouble(fields[2], x)) fail(line_no, "bad x '" + std::string(fields[2]) + "'");
    if (!ParseDouble(fields[3], y)) fail(line_no, "bad y '" + std::string(fields[3]) + "'");
    pt.p = {x, y};
    const std::string id(fields[0]);
    Trajectory& traj = by_id[id];
    traj.vehicle_id = id;
    traj.points.push_back(pt);
  }

  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, traj] : by_id) {
    std::stable_sort(traj.points.begin(), traj.points.end(),
                     [](const TimedPoint& a, const TimedPoint& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      if (traj.points[i].t == traj.points[i - 1].t) {
        throw Error(ErrorCode::kParseError,
                    path.string() + ": duplicate timestamp for vehicle " + id);
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

PointSet Flatten(const std::vector<Trajectory>& trajectories) {
  Eigen::Index n = 0;
  for (const auto& t : trajectories) n += static_cast<Eigen::Index>(t.points.size());
  PointSet out(n, 2);
  Eigen::Index row = 0;
  for (const auto& t : trajectories) {
    for (const auto& p : t.points) out.row(row++) = p.p.transpose();
  }
  return out;
}

}  // namespace wzmap
