#include "qmpc/terrain.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qmpc {

bool HeightMap2_5D::contains(const Vec2& xy) const {
  const double gx = (xy.x() - origin_.x()) / res_;
  const double gy = (xy.y() - origin_.y()) / res_;
  return gx >= 0 && gy >= 0 && gx <= nx_ - 1 && gy <= ny_ - 1;
}

double HeightMap2_5D::height_at(const Vec2& xy) const {
  if (!contains(xy))
    throw OutOfMap("(" + std::to_string(xy.x()) + ", " +
                   std::to_string(xy.y()) + ")");
  const double gx = (xy.x() - origin_.x()) / res_;
  const double gy = (xy.y() - origin_.y()) / res_;
  const int ix = std::min((int)gx, nx_ - 2);
  const int iy = std::min((int)gy, ny_ - 2);
  const double tx = gx - ix, ty = gy - iy;
  return at(ix, iy) * (1 - tx) * (1 - ty) + at(ix + 1, iy) * tx * (1 - ty) +
         at(ix, iy + 1) * (1 - tx) * ty + at(ix + 1, iy + 1) * tx * ty;
}

Vec3 HeightMap2_5D::normal_at(const Vec2& xy) const {
  if (!contains(xy)) throw OutOfMap("normal query");
  const double e = res_;
  auto clamped = [&](double x, double y) {
    x = std::min(std::max(x, origin_.x()), origin_.x() + (nx_ - 1) * res_);
    y = std::min(std::max(y, origin_.y()), origin_.y() + (ny_ - 1) * res_);
    return height_at(Vec2(x, y));
  };
  const double dzdx =
      (clamped(xy.x() + e, xy.y()) - clamped(xy.x() - e, xy.y())) / (2 * e);
  const double dzdy =
      (clamped(xy.x(), xy.y() + e) - clamped(xy.x(), xy.y() - e)) / (2 * e);
  return Vec3(-dzdx, -dzdy, 1.0).normalized();
}

std::string HeightMap2_5D::to_csv() const {
  std::ostringstream out;
  out << "x,y,z\n";
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix)
      out << origin_.x() + ix * res_ << ',' << origin_.y() + iy * res_ << ','
          << at(ix, iy) << '\n';
  return out.str();
}

namespace {

HeightMap2_5D make_centered(double x_span, double y_span, double resolution) {
  const int nx = (int)std::ceil(x_span / resolution) + 1;
  const int ny = (int)std::ceil(y_span / resolution) + 1;
  return HeightMap2_5D(Vec2(-x_span / 2, -y_span / 2), resolution, nx, ny);
}

}  // namespace

HeightMap2_5D build_flat(double x_span, double y_span, double resolution) {
  return make_centered(x_span, y_span, resolution);
}

HeightMap2_5D build_pallets(const PalletSpec& spec, double x_span,
                            double y_span, double resolution) {
  if (spec.lengths.size() != spec.heights.size())
    throw InvalidSpec("pallet lengths/heights size mismatch");
  HeightMap2_5D map = make_centered(x_span, y_span, resolution);
  double x0 = spec.start_x;
  for (size_t p = 0; p < spec.lengths.size(); ++p) {
    const double x1 = x0 + spec.lengths[p];
    for (int ix = 0; ix < map.nx(); ++ix) {
      const double x = map.origin().x() + ix * resolution;
      if (x >= x0 && x <= x1)
        for (int iy = 0; iy < map.ny(); ++iy) map.at(ix, iy) = spec.heights[p];
    }
    x0 = x1 + (p < spec.gaps.size() ? spec.gaps[p] : 0.0);
  }
  return map;
}

HeightMap2_5D build_chimney(const ChimneySpec& spec, double x_span,
                            double y_span, double resolution) {
  HeightMap2_5D map = make_centered(x_span, y_span, resolution);
  const double slope = std::tan(spec.wall_angle_deg * M_PI / 180.0);
  for (int iy = 0; iy < map.ny(); ++iy) {
    const double y = map.origin().y() + iy * resolution;
    const double h =
        std::max(0.0, (std::abs(y) - spec.floor_half_width) * slope);
    for (int ix = 0; ix < map.nx(); ++ix) map.at(ix, iy) = h;
  }
  return map;
}

HeightMap2_5D build_rough(const RoughSpec& spec, double x_span, double y_span,
                          double resolution) {
  HeightMap2_5D map = make_centered(x_span, y_span, resolution);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> dist(0.0, spec.amplitude);
  for (int iy = 0; iy < map.ny(); ++iy)
    for (int ix = 0; ix < map.nx(); ++ix) map.at(ix, iy) = dist(rng);
  for (int pass = 0; pass < spec.smoothing_passes; ++pass) {
    HeightMap2_5D prev = map;
    for (int iy = 1; iy < map.ny() - 1; ++iy)
      for (int ix = 1; ix < map.nx() - 1; ++ix)
        map.at(ix, iy) =
            (prev.at(ix, iy) + prev.at(ix - 1, iy) + prev.at(ix + 1, iy) +
             prev.at(ix, iy - 1) + prev.at(ix, iy + 1)) /
            5.0;
  }
  return map;
}

}  // namespace qmpc
