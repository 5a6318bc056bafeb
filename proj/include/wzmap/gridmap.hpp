#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <Eigen/Core>

#include "wzmap/geometry.hpp"

namespace wzmap {

struct WorkZoneLayout;

// Binary raster. Cell (col, row) spans
// [origin.x + col*res, origin.x + (col+1)*res) x [origin.y + row*res, ...).
// Storage is row-major with row 0 at the smallest y.
class OccupancyGrid {
 public:
  using Cells =
      Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  static constexpr std::uint8_t kFree = 0;
  static constexpr std::uint8_t kOccupied = 1;

  OccupancyGrid() = default;
  OccupancyGrid(const Eigen::Vector2d& origin, double resolution, int width,
                int height, std::uint8_t fill = kOccupied);

  // Covers `bounds` with ceil(extent / resolution) cells per axis, anchored at
  // bounds.min().
  static OccupancyGrid FromBounds(const Box& bounds, double resolution,
                                  std::uint8_t fill = kOccupied);

  const Eigen::Vector2d& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int width() const { return static_cast<int>(cells_.cols()); }
  int height() const { return static_cast<int>(cells_.rows()); }
  const Cells& cells() const { return cells_; }
  Cells& cells() { return cells_; }

  bool occupied(int col, int row) const { return cells_(row, col) != kFree; }
  bool free(int col, int row) const { return cells_(row, col) == kFree; }
  void set(int col, int row, std::uint8_t value) { cells_(row, col) = value; }
  bool Contains(int col, int row) const {
    return col >= 0 && row >= 0 && col < width() && row < height();
  }

  Eigen::Vector2d CellCenter(int col, int row) const;
  Box CellBox(int col, int row) const;
  // Cell containing `p`, or nullopt when outside the grid.
  std::optional<Eigen::Vector2i> CellAt(const Eigen::Vector2d& p) const;
  // True if `p` falls in a free cell of the grid (outside counts as occupied).
  bool IsFreeAt(const Eigen::Vector2d& p) const;

  bool SameFrame(const OccupancyGrid& other) const;
  long CountFree() const;

  bool operator==(const OccupancyGrid& other) const;

 private:
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  double resolution_ = 1.0;
  Cells cells_;
};

// Inverse occupancy grid: every cell that intersects the axis-aligned square
// of side `footprint_side` centred on a sample is marked free, the rest
// occupied. Intersection is against the half-open cell, so a zero footprint
// frees exactly the containing cell.
OccupancyGrid FromSamples(const Eigen::Ref<const Eigen::MatrixX2d>& samples,
                          double footprint_side, const Box& bounds,
                          double resolution);

// Obstacle-only map: cells whose centre lies within `cone_radius` of a cone
// or whose square touches the road boundary polyline are occupied.
OccupancyGrid FromObstacles(const WorkZoneLayout& layout, double cone_radius,
                            const Box& bounds, double resolution);

// Dilation by a Euclidean disk measured between cell centres.
OccupancyGrid Inflate(const OccupancyGrid& grid, double radius);

// |predicted free AND truth free| / |predicted free|.
double Precision(const OccupancyGrid& predicted, const OccupancyGrid& truth);

// P2 (ASCII) PGM, occupied = 0 and free = 255, top image row = largest y.
// Frame metadata lives in a JSON sidecar next to the image (see
// SidecarPath).
void SavePgm(const OccupancyGrid& grid, const std::filesystem::path& path);
OccupancyGrid LoadPgm(const std::filesystem::path& path);
std::filesystem::path SidecarPath(const std::filesystem::path& pgm_path);

}  // namespace wzmap
