#include "wzmap/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wzmap/error.hpp"

namespace wzmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  Pose pose;
  double g = 0.0;
  int parent = -1;
  int steer = 0;  // -1 right, 0 straight, +1 left
};

struct OpenEntry {
  double f;
  double h;
  long seq;
  int node;

  // std::priority_queue pops the largest element; invert everything.
  bool operator<(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return seq > o.seq;
  }
};

Pose Advance(const Pose& p, double curvature, double length) {
  if (curvature == 0.0) {
    return {p.x + length * std::cos(p.heading), p.y + length * std::sin(p.heading),
            p.heading};
  }
  const double th = p.heading + curvature * length;
  return {p.x + (std::sin(th) - std::sin(p.heading)) / curvature,
          p.y - (std::cos(th) - std::cos(p.heading)) / curvature, NormalizeAngle(th)};
}

}  // namespace

double ReferencePath::Length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    total += (poses[i].position() - poses[i - 1].position()).norm();
  }
  return total;
}

CostField HolonomicHeuristic(const OccupancyGrid& grid, const Eigen::Vector2d& goal) {
  const auto goal_cell = grid.CellAt(goal);
  if (!goal_cell || grid.occupied(goal_cell->x(), goal_cell->y())) {
    throw Error(ErrorCode::kGoalOccupied, "heuristic goal is not in a free cell");
  }
  const int w = grid.width();
  const int h = grid.height();
  const double res = grid.resolution();
  const double diag = res * std::sqrt(2.0);
  CostField cost = CostField::Constant(h, w, kInf);

  using Item = std::pair<double, int>;  // (distance, row * w + col)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  cost(goal_cell->y(), goal_cell->x()) = 0.0;
  queue.push({0.0, goal_cell->y() * w + goal_cell->x()});
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    const int r = idx / w;
    const int c = idx % w;
    if (d > cost(r, c)) continue;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (!grid.Contains(nc, nr) || grid.occupied(nc, nr)) continue;
        const bool diagonal = dr != 0 && dc != 0;
        if (diagonal && (grid.occupied(c + dc, r) || grid.occupied(c, r + dr))) continue;
        const double nd = d + (diagonal ? diag : res);
        if (nd < cost(nr, nc)) {
          cost(nr, nc) = nd;
          queue.push({nd, nr * w + nc});
        }
      }
    }
  }
  return cost;
}

int EffectiveHeadingBins(const PlannerParams& params, double resolution) {
  const double turn = resolution * std::sqrt(2.0) / params.r_min;
  const int needed = static_cast<int>(std::ceil(2.0 * kPi / turn - 1e-9));
  return std::max(params.heading_bins, needed);
}

ReferencePath HybridAStar(const OccupancyGrid& grid, const Pose& start, const Pose& goal,
                          const PlannerParams& params, PlanStats* stats) {
  if (!(params.r_min > 0.0) || params.heading_bins < 1 || params.collision_samples < 1) {
    throw Error(ErrorCode::kInvalidSpec, "planner needs r_min > 0 and heading_bins >= 1");
  }
  if (!grid.IsFreeAt(start.position()) || !grid.IsFreeAt(goal.position())) {
    throw Error(ErrorCode::kStartOrGoalOccupied, "start or goal pose is not in free space");
  }
  const CostField holo = HolonomicHeuristic(grid, goal.position());

  const int w = grid.width();
  const double step = grid.resolution() * std::sqrt(2.0);
  const double kappa = 1.0 / params.r_min;
  const int bins = EffectiveHeadingBins(params, grid.resolution());
  const double heading_tol = DegToRad(params.goal_heading_tolerance);
  const double bin_width = 2.0 * kPi / bins;

  auto key_of = [&](const Pose& p, const Eigen::Vector2i& cell) {
    int bin = static_cast<int>(std::floor((p.heading + kPi) / bin_width));
    bin = ((bin % bins) + bins) % bins;
    return (static_cast<std::uint64_t>(cell.y()) * w + cell.x()) * bins + bin;
  };
  auto heuristic = [&](const Pose& p, const Eigen::Vector2i& cell) {
    return std::max((p.position() - goal.position()).norm(), holo(cell.y(), cell.x()));
  };
  auto at_goal = [&](const Pose& p) {
    return (p.position() - goal.position()).norm() <= params.goal_tolerance &&
           std::abs(NormalizeAngle(p.heading - goal.heading)) <= heading_tol;
  };

  std::unordered_set<std::uint64_t> closed;
  std::vector<Node> nodes;
  std::priority_queue<OpenEntry> open;
  long seq = 0;

  Pose s0 = start;
  s0.heading = NormalizeAngle(s0.heading);
  const Eigen::Vector2i start_cell = *grid.CellAt(s0.position());
  nodes.push_back({s0, 0.0, -1, 0});
  {
    const double h0 = heuristic(s0, start_cell);
    if (!std::isfinite(h0)) throw Error(ErrorCode::kNoPath, "goal unreachable from start");
    open.push({h0, h0, seq++, 0});
  }

  long expansions = 0;
  int found = -1;
  Pose closest = s0;
  double closest_h = kInf;
  auto report = [&] {
    if (stats == nullptr) return;
    stats->expansions = expansions;
    stats->closest = closest;
    stats->closest_h = closest_h;
  };
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const Node cur = nodes[top.node];
    const Eigen::Vector2i cell = *grid.CellAt(cur.pose.position());
    if (!closed.insert(key_of(cur.pose, cell)).second) continue;
    if (top.h < closest_h) {
      closest_h = top.h;
      closest = cur.pose;
    }
    if (at_goal(cur.pose)) {
      found = top.node;
      break;
    }
    if (++expansions > params.max_expansions) {
      report();
      throw Error(ErrorCode::kNoPath, "search exceeded max_expansions");
    }
    for (int steer = -1; steer <= 1; ++steer) {
      const double k = steer * kappa;
      bool ok = true;
      Pose end;
      for (int i = 1; i <= params.collision_samples; ++i) {
        const Pose p = Advance(cur.pose, k, step * i / params.collision_samples);
        if (!grid.IsFreeAt(p.position())) {
          ok = false;
          break;
        }
        end = p;
      }
      if (!ok) continue;
      const Eigen::Vector2i child_cell = *grid.CellAt(end.position());
      if (closed.count(key_of(end, child_cell)) != 0) continue;
      const double h = heuristic(end, child_cell);
      if (!std::isfinite(h)) continue;
      double g = cur.g + step * (1.0 + params.turn_penalty * std::abs(steer));
      if (steer != cur.steer) g += params.steer_change_penalty;
      nodes.push_back({end, g, top.node, steer});
      open.push({g + h, h, seq++, static_cast<int>(nodes.size() - 1)});
    }
  }
  report();
  if (found < 0) throw Error(ErrorCode::kNoPath, "open set exhausted without reaching goal");

  ReferencePath path;
  path.arc_step = step;
  for (int i = found; i >= 0; i = nodes[i].parent) path.poses.push_back(nodes[i].pose);
  std::reverse(path.poses.begin(), path.poses.end());
  return path;
}

ReferencePath Resample(const ReferencePath& path, double step) {
  if (path.poses.empty()) throw Error(ErrorCode::kEmptyPath, "cannot resample an empty path");
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidSpec, "resample step must be > 0");
  const auto& in = path.poses;
  std::vector<double> arc(in.size(), 0.0);
  for (std::size_t i = 1; i < in.size(); ++i) {
    arc[i] = arc[i - 1] + (in[i].position() - in[i - 1].position()).norm();
  }
  const double total = arc.back();
  ReferencePath out;
  if (in.size() == 1 || total == 0.0) {
    out.poses = {in.front()};
    out.arc_step = 0.0;
    return out;
  }
  const int segments = std::max(1, static_cast<int>(std::ceil(total / step - 1e-9)));
  out.arc_step = total / segments;
  out.poses.reserve(segments + 1);
  std::size_t j = 0;
  for (int i = 0; i <= segments; ++i) {
    if (i == segments) {
      out.poses.push_back(in.back());
      break;
    }
    const double s = total * i / segments;
    while (j + 2 < in.size() && arc[j + 1] < s) ++j;
    const double len = arc[j + 1] - arc[j];
    const double u = len > 0.0 ? std::clamp((s - arc[j]) / len, 0.0, 1.0) : 0.0;
    const Pose& a = in[j];
    const Pose& b = in[j + 1];
    out.poses.push_back({a.x + u * (b.x - a.x), a.y + u * (b.y - a.y),
                         NormalizeAngle(a.heading + u * NormalizeAngle(b.heading - a.heading))});
  }
  return out;
}

void SavePathCsv(const ReferencePath& path, const std::filesystem::path& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (f == nullptr) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  std::fputs("s,x,y,heading\n", f);
  double s = 0.0;
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    const Pose& p = path.poses[i];
    if (i > 0) s += (p.position() - path.poses[i - 1].position()).norm();
    std::fprintf(f, "%.9f,%.9f,%.9f,%.12f\n", s, p.x, p.y, p.heading);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::kIoError, "failed writing " + file.string());
}

ReferencePath LoadPathCsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  ReferencePath path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "s,x,y,heading") {
        throw Error(ErrorCode::kParseError, file.string() + ":1: expected header s,x,y,heading");
      }
      continue;
    }
    double s = 0.0;
    Pose p;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &s, &p.x, &p.y, &p.heading, &tail) != 4) {
      throw Error(ErrorCode::kParseError,
                  file.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    path.poses.push_back(p);
  }
  if (path.poses.size() >= 2) path.arc_step = path.Length() / (path.poses.size() - 1);
  return path;
}

}  // namespace wzmap
