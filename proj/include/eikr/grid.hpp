#ifndef EIKR_GRID_HPP
#define EIKR_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace eikr {

/// Regular 2-D raster of nodes in the x (lateral) / z (depth) plane.
/// Node (i,k) sits at (origin_x + i*dx, origin_z + k*dz).
struct Grid2D {
  double origin_x = 0.0;
  double origin_z = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  int nx = 0;
  int nz = 0;

  double x_at(int i) const { return origin_x + i * dx; }
  double z_at(int k) const { return origin_z + k * dz; }
  double x_max() const { return origin_x + (nx - 1) * dx; }
  double z_max() const { return origin_z + (nz - 1) * dz; }
  double width() const { return (nx - 1) * dx; }
  double depth() const { return (nz - 1) * dz; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * nz; }

  /// Linear index of node (i,k); x scanlines are contiguous, z is the
  /// major (slowest) dimension. Matches the raster file payload order.
  std::size_t idx(int i, int k) const {
    return static_cast<std::size_t>(k) * nx + i;
  }

  bool contains(double x, double z) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Validating constructor; throws std::invalid_argument on bad spacing
/// or node counts.
Grid2D make_grid(double origin_x, double origin_z, double dx, double dz,
                 int nx, int nz);

/// Grid laterally centered on x = 0 with its top row at z = 0. Node counts
/// are chosen so (nx-1)*dx best approximates `width` (same for depth).
Grid2D make_centered_grid(double width, double depth, double dx, double dz);

struct FracIndex {
  double i = 0.0;
  double k = 0.0;
};

/// Linear map from physical position to fractional node index. No clamping;
/// callers decide how to treat out-of-range results.
FracIndex world_to_index(const Grid2D& grid, double x, double z);

/// Inverse of world_to_index.
void index_to_world(const Grid2D& grid, double i, double k, double& x, double& z);

/// A value per grid node, stored in idx() order.
template <typename T>
struct Field {
  Grid2D grid;
  std::vector<T> v;

  Field() = default;
  Field(const Grid2D& g, T fill = T{})
      : grid(g), v(g.size(), fill) {}

  T& at(int i, int k) { return v[grid.idx(i, k)]; }
  const T& at(int i, int k) const { return v[grid.idx(i, k)]; }
};

using FieldF = Field<float>;
using FieldD = Field<double>;

namespace detail {
// Resolves a physical query point to the cell (i0,k0) and intra-cell
// fractions, clamping only boundary round-off. Throws std::out_of_range
// for genuinely outside points.
void bilinear_locate(const Grid2D& grid, double x, double z,
                     int& i0, int& k0, double& fx, double& fz);
}  // namespace detail

/// Bilinear interpolation of the four nodes surrounding (x,z).
/// Throws std::out_of_range if the query lies outside the grid.
template <typename T>
double sample_bilinear(const Field<T>& f, double x, double z) {
  int i0, k0;
  double fx, fz;
  detail::bilinear_locate(f.grid, x, z, i0, k0, fx, fz);
  const double v00 = f.at(i0, k0);
  const double v10 = f.at(i0 + 1, k0);
  const double v01 = f.at(i0, k0 + 1);
  const double v11 = f.at(i0 + 1, k0 + 1);
  return (1.0 - fz) * ((1.0 - fx) * v00 + fx * v10) +
         fz * ((1.0 - fx) * v01 + fx * v11);
}

}  // namespace eikr

#endif
