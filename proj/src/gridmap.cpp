#include "wzmap/gridmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "wzmap/error.hpp"
#include "wzmap/workzone.hpp"

namespace wzmap {

OccupancyGrid::OccupancyGrid(const Eigen::Vector2d& origin, double resolution,
                             int width, int height, std::uint8_t fill)
    : origin_(origin), resolution_(resolution) {
  if (!(resolution > 0.0) || width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidSpec, "grid needs resolution > 0 and size >= 0");
  }
  cells_.setConstant(height, width, fill);
}

OccupancyGrid OccupancyGrid::FromBounds(const Box& bounds, double resolution,
                                        std::uint8_t fill) {
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "grid resolution must be > 0");
  }
  const Eigen::Vector2d extent = bounds.sizes();
  const int w = std::max(1, static_cast<int>(std::ceil(extent.x() / resolution - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil(extent.y() / resolution - 1e-9)));
  return OccupancyGrid(bounds.min(), resolution, w, h, fill);
}

Eigen::Vector2d OccupancyGrid::CellCenter(int col, int row) const {
  return origin_ + resolution_ * Eigen::Vector2d(col + 0.5, row + 0.5);
}

Box OccupancyGrid::CellBox(int col, int row) const {
  const Eigen::Vector2d lo = origin_ + resolution_ * Eigen::Vector2d(col, row);
  return Box(lo, lo + Eigen::Vector2d::Constant(resolution_));
}

std::optional<Eigen::Vector2i> OccupancyGrid::CellAt(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d q = (p - origin_) / resolution_;
  if (!std::isfinite(q.x()) || !std::isfinite(q.y())) return std::nullopt;
  const int col = static_cast<int>(std::floor(q.x()));
  const int row = static_cast<int>(std::floor(q.y()));
  if (!Contains(col, row)) return std::nullopt;
  return Eigen::Vector2i(col, row);
}

bool OccupancyGrid::IsFreeAt(const Eigen::Vector2d& p) const {
  const auto cell = CellAt(p);
  return cell && free(cell->x(), cell->y());
}

bool OccupancyGrid::SameFrame(const OccupancyGrid& other) const {
  return origin_ == other.origin_ && resolution_ == other.resolution_ &&
         width() == other.width() && height() == other.height();
}

long OccupancyGrid::CountFree() const { return (cells_ == kFree).count(); }

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return SameFrame(other) && (cells_ == other.cells_).all();
}

namespace {

// Index range [lo, hi] of cells along one axis whose half-open span
// [o + i*res, o + (i+1)*res) meets the closed interval [a, b].
std::pair<int, int> CellSpan(double a, double b, double o, double res, int n) {
  auto meets = [&](int i) {
    const double lo = o + i * res;
    return b >= lo && a < lo + res;
  };
  if (n <= 0 || b < o || a >= o + n * res) return {0, -1};
  a = std::max(a, o - res);
  b = std::min(b, o + (n + 1) * res);
  int lo = static_cast<int>(std::floor((a - o) / res));
  int hi = static_cast<int>(std::floor((b - o) / res));
  // The floor estimate can be off by one near cell edges; settle it with the
  // exact predicate.
  if (meets(lo - 1)) --lo;
  if (!meets(lo)) ++lo;
  if (meets(hi + 1)) ++hi;
  if (!meets(hi)) --hi;
  return {std::max(lo, 0), std::min(hi, n - 1)};
}

}  // namespace

OccupancyGrid FromSamples(const Eigen::Ref<const Eigen::MatrixX2d>& samples,
                          double footprint_side, const Box& bounds,
                          double resolution) {
  if (!(footprint_side >= 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "footprint_side must be >= 0");
  }
  OccupancyGrid grid = OccupancyGrid::FromBounds(bounds, resolution);
  const double half = footprint_side / 2.0;
  const Eigen::Vector2d& o = grid.origin();
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double x = samples(i, 0);
    const double y = samples(i, 1);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    const auto [c0, c1] =
        CellSpan(x - half, x + half, o.x(), resolution, grid.width());
    const auto [r0, r1] =
        CellSpan(y - half, y + half, o.y(), resolution, grid.height());
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) grid.set(c, r, OccupancyGrid::kFree);
    }
  }
  return grid;
}

OccupancyGrid FromObstacles(const WorkZoneLayout& layout, double cone_radius,
                            const Box& bounds, double resolution) {
  OccupancyGrid grid =
      OccupancyGrid::FromBounds(bounds, resolution, OccupancyGrid::kFree);
  const double r_sq = cone_radius * cone_radius;
  const int reach = static_cast<int>(std::ceil(cone_radius / resolution)) + 1;
  for (const auto& cone : layout.cones) {
    const Eigen::Vector2d q = (cone - grid.origin()) / resolution;
    const int cc = static_cast<int>(std::floor(q.x()));
    const int cr = static_cast<int>(std::floor(q.y()));
    for (int r = cr - reach; r <= cr + reach; ++r) {
      for (int c = cc - reach; c <= cc + reach; ++c) {
        if (!grid.Contains(c, r)) continue;
        if ((grid.CellCenter(c, r) - cone).squaredNorm() <= r_sq) {
          grid.set(c, r, OccupancyGrid::kOccupied);
        }
      }
    }
  }
  const Polyline& edge = layout.road_boundary;
  for (std::size_t i = 0; i + 1 < edge.size(); ++i) {
    const Eigen::Vector2d& a = edge[i];
    const Eigen::Vector2d& b = edge[i + 1];
    Box seg_box;
    seg_box.extend(a);
    seg_box.extend(b);
    const auto [c0, c1] = CellSpan(seg_box.min().x(), seg_box.max().x(),
                                   grid.origin().x(), resolution, grid.width());
    const auto [r0, r1] = CellSpan(seg_box.min().y(), seg_box.max().y(),
                                   grid.origin().y(), resolution, grid.height());
    // Widen by one cell to include closed-box contact on the low side.
    for (int r = std::max(r0 - 1, 0); r <= r1; ++r) {
      for (int c = std::max(c0 - 1, 0); c <= c1; ++c) {
        if (SegmentIntersectsBox(a, b, grid.CellBox(c, r))) {
          grid.set(c, r, OccupancyGrid::kOccupied);
        }
      }
    }
  }
  return grid;
}

OccupancyGrid Inflate(const OccupancyGrid& grid, double radius) {
  if (!(radius >= 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "inflation radius must be >= 0");
  }
  const int w = grid.width();
  const int h = grid.height();
  const double reach_cells = radius / grid.resolution();
  const int reach = static_cast<int>(std::floor(reach_cells + 1e-9));
  if (reach == 0 || w == 0 || h == 0) return grid;

  // Horizontal half-width of the disk at each row offset, in whole cells.
  const double limit_sq = reach_cells * reach_cells * (1.0 + 1e-12) + 1e-9;
  std::vector<int> half_width(reach + 1);
  for (int dr = 0; dr <= reach; ++dr) {
    int hw = 0;
    while (static_cast<double>((hw + 1) * (hw + 1) + dr * dr) <= limit_sq) ++hw;
    half_width[dr] = hw;
  }

  // nearest[r][c]: column distance to the closest occupied cell in row r.
  const int kFar = w + 1;
  std::vector<int> nearest(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    int* row = &nearest[static_cast<std::size_t>(r) * w];
    int last = -kFar;
    for (int c = 0; c < w; ++c) {
      if (grid.occupied(c, r)) last = c;
      row[c] = c - last;
    }
    last = 2 * kFar + w;
    for (int c = w - 1; c >= 0; --c) {
      if (grid.occupied(c, r)) last = c;
      row[c] = std::min(row[c], last - c);
    }
  }

  OccupancyGrid out = grid;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid.occupied(c, r)) continue;
      for (int dr = -reach; dr <= reach; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        if (nearest[static_cast<std::size_t>(rr) * w + c] <= half_width[std::abs(dr)]) {
          out.set(c, r, OccupancyGrid::kOccupied);
          break;
        }
      }
    }
  }
  return out;
}

double Precision(const OccupancyGrid& predicted, const OccupancyGrid& truth) {
  if (!predicted.SameFrame(truth)) {
    throw Error(ErrorCode::kGridMismatch,
                "precision needs grids with identical origin, resolution and size");
  }
  const auto pred_free = predicted.cells() == OccupancyGrid::kFree;
  const long n_pred = pred_free.count();
  if (n_pred == 0) {
    throw Error(ErrorCode::kNoPredictedFree, "predicted grid has no free cells");
  }
  const long tp = (pred_free && truth.cells() == OccupancyGrid::kFree).count();
  return static_cast<double>(tp) / static_cast<double>(n_pred);
}

std::filesystem::path SidecarPath(const std::filesystem::path& pgm_path) {
  std::filesystem::path p = pgm_path;
  p.replace_extension(".json");
  return p;
}

void SavePgm(const OccupancyGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "P2\n" << grid.width() << ' ' << grid.height() << "\n255\n";
  for (int r = grid.height() - 1; r >= 0; --r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (c > 0) out << ' ';
      out << (grid.free(c, r) ? 255 : 0);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());

  const std::filesystem::path meta_path = SidecarPath(path);
  std::ofstream meta(meta_path);
  if (!meta) throw Error(ErrorCode::kIoError, "cannot write " + meta_path.string());
  const nlohmann::json j = {{"origin", internal::PointToJson(grid.origin())},
                            {"resolution", grid.resolution()},
                            {"width", grid.width()},
                            {"height", grid.height()}};
  meta << j.dump(2) << '\n';
}

namespace {

// Next whitespace-separated token, skipping '#' comments.
bool NextToken(std::istream& in, std::string& token) {
  while (in >> token) {
    if (token[0] != '#') return true;
    std::string rest;
    std::getline(in, rest);
  }
  return false;
}

int ParseInt(std::istream& in, const std::string& path, const char* what) {
  std::string token;
  if (!NextToken(in, token)) {
    throw Error(ErrorCode::kParseError, path + ": truncated PGM, missing " + what);
  }
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, path + ": bad " + what + " '" + token + "'");
  }
}

}  // namespace

OccupancyGrid LoadPgm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  const std::string name = path.string();
  std::string magic;
  if (!NextToken(in, magic) || magic != "P2") {
    throw Error(ErrorCode::kParseError, name + ": not a P2 PGM");
  }
  const int w = ParseInt(in, name, "width");
  const int h = ParseInt(in, name, "height");
  const int maxval = ParseInt(in, name, "maxval");
  if (w < 0 || h < 0 || maxval <= 0) {
    throw Error(ErrorCode::kParseError, name + ": bad PGM header");
  }

  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double resolution = 1.0;
  const std::filesystem::path meta_path = SidecarPath(path);
  std::ifstream meta(meta_path);
  if (!meta) throw Error(ErrorCode::kIoError, "cannot read " + meta_path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(meta);
    origin = internal::PointFromJson(j.at("origin"));
    resolution = j.at("resolution").get<double>();
    if (j.at("width").get<int>() != w || j.at("height").get<int>() != h) {
      throw Error(ErrorCode::kParseError,
                  meta_path.string() + ": size disagrees with " + name);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, meta_path.string() + ": " + e.what());
  }

  OccupancyGrid grid(origin, resolution, w, h);
  for (int r = h - 1; r >= 0; --r) {
    for (int c = 0; c < w; ++c) {
      const int v = ParseInt(in, name, "pixel");
      if (v < 0 || v > maxval) {
        throw Error(ErrorCode::kParseError, name + ": pixel out of range");
      }
      // Anything not black counts as free.
      grid.set(c, r, v == 0 ? OccupancyGrid::kOccupied : OccupancyGrid::kFree);
    }
  }
  return grid;
}

}  // namespace wzmap
