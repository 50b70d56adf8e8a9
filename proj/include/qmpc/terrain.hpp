#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmpc/types.hpp"

namespace qmpc {

// Gridded 2.5D elevation map with bilinear interpolation.
class HeightMap2_5D {
 public:
  HeightMap2_5D(const Vec2& origin, double resolution, int nx, int ny)
      : origin_(origin), res_(resolution), nx_(nx), ny_(ny),
        heights_(nx * ny, 0.0) {
    if (resolution <= 0 || nx < 2 || ny < 2)
      throw InvalidSpec("heightmap needs resolution > 0 and >= 2x2 cells");
  }

  double& at(int ix, int iy) { return heights_[iy * nx_ + ix]; }
  double at(int ix, int iy) const { return heights_[iy * nx_ + ix]; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double resolution() const { return res_; }
  const Vec2& origin() const { return origin_; }
  bool contains(const Vec2& xy) const;

  double height_at(const Vec2& xy) const;  // bilinear; throws OutOfMap
  Vec3 normal_at(const Vec2& xy) const;    // unit normal, z > 0

  std::string to_csv() const;

 private:
  Vec2 origin_;
  double res_;
  int nx_, ny_;
  std::vector<double> heights_;
};

struct PalletSpec {
  double start_x = 1.0;  // m, leading edge of the first pallet
  std::vector<double> lengths = {1.0};
  std::vector<double> heights = {0.13};
  std::vector<double> gaps = {};  // gap after each pallet except the last
};

struct ChimneySpec {
  double floor_half_width = 0.15;  // m, flat strip around y = 0
  double wall_angle_deg = 35.0;
};

struct RoughSpec {
  uint64_t seed = 1;
  double amplitude = 0.04;  // m
  int smoothing_passes = 2;
};

HeightMap2_5D build_flat(double x_span, double y_span, double resolution);
HeightMap2_5D build_pallets(const PalletSpec& spec, double x_span,
                            double y_span, double resolution);
HeightMap2_5D build_chimney(const ChimneySpec& spec, double x_span,
                            double y_span, double resolution);
HeightMap2_5D build_rough(const RoughSpec& spec, double x_span, double y_span,
                          double resolution);

}  // namespace qmpc
