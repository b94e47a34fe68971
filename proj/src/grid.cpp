#include "eikr/grid.hpp"

#include <cmath>

namespace eikr {

namespace {
// Relative slack absorbing round-off at the grid boundary.
constexpr double kEdgeEps = 1e-9;
}  // namespace

bool Grid2D::contains(double x, double z) const {
  const double ex = kEdgeEps * (std::abs(dx) * nx);
  const double ez = kEdgeEps * (std::abs(dz) * nz);
  return x >= origin_x - ex && x <= x_max() + ex &&
         z >= origin_z - ez && z <= z_max() + ez;
}

Grid2D make_grid(double origin_x, double origin_z, double dx, double dz,
                 int nx, int nz) {
  if (!(dx > 0.0) || !(dz > 0.0))
    throw std::invalid_argument("grid spacing must be positive");
  if (nx < 2 || nz < 2)
    throw std::invalid_argument("grid needs at least 2x2 nodes");
  return Grid2D{origin_x, origin_z, dx, dz, nx, nz};
}

Grid2D make_centered_grid(double width, double depth, double dx, double dz) {
  if (!(width > 0.0) || !(depth > 0.0))
    throw std::invalid_argument("grid extent must be positive");
  const int nx = static_cast<int>(std::lround(width / dx)) + 1;
  const int nz = static_cast<int>(std::lround(depth / dz)) + 1;
  const Grid2D g = make_grid(-(nx - 1) * dx / 2.0, 0.0, dx, dz, nx, nz);
  return g;
}

FracIndex world_to_index(const Grid2D& grid, double x, double z) {
  return FracIndex{(x - grid.origin_x) / grid.dx, (z - grid.origin_z) / grid.dz};
}

void index_to_world(const Grid2D& grid, double i, double k, double& x, double& z) {
  x = grid.origin_x + i * grid.dx;
  z = grid.origin_z + k * grid.dz;
}

namespace detail {

void bilinear_locate(const Grid2D& grid, double x, double z,
                     int& i0, int& k0, double& fx, double& fz) {
  if (!grid.contains(x, z))
    throw std::out_of_range("bilinear query outside grid bounds");
  const FracIndex f = world_to_index(grid, x, z);
  double fi = f.i;
  double fk = f.k;
  if (fi < 0.0) fi = 0.0;
  if (fk < 0.0) fk = 0.0;
  if (fi > grid.nx - 1) fi = grid.nx - 1;
  if (fk > grid.nz - 1) fk = grid.nz - 1;
  i0 = static_cast<int>(fi);
  k0 = static_cast<int>(fk);
  if (i0 > grid.nx - 2) i0 = grid.nx - 2;
  if (k0 > grid.nz - 2) k0 = grid.nz - 2;
  fx = fi - i0;
  fz = fk - k0;
}

}  // namespace detail

}  // namespace eikr
