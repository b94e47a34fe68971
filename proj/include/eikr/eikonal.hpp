#ifndef EIKR_EIKONAL_HPP
#define EIKR_EIKONAL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "eikr/medium.hpp"

namespace eikr {

/// Fast-marching parameters. The neighbor scheme is 4-connected and the
/// update is first-order upwind; only the source handling is tunable.
struct FmConfig {
  /// Radius of the analytically initialized disk around the source.
  /// Nodes inside are set to distance / c(source) and frozen before the
  /// march starts, which suppresses the point-source error of the upwind
  /// scheme. 0 selects the default 3 * max(dx, dz). Must otherwise be
  /// >= max(dx, dz).
  double source_disk_radius = 0.0;
};

/// One-way first-arrival times from a point source over a heterogeneous
/// speed map.
struct TravelTimeField {
  FieldF t;  // seconds
  double source_x = 0.0;
  double source_z = 0.0;
  double source_c = 0.0;            // speed at the source, m/s
  double source_disk_radius = 0.0;  // analytic-init disk actually used, m

  const Grid2D& grid() const { return t.grid; }

  /// Bilinear off-node interpolation, except inside the source disk where
  /// the time cone has its apex: there the straight-ray value d / c(src) is
  /// exact (the solver froze those nodes analytically) while interpolating
  /// across the apex would bias times upward by O(h).
  double sample(double x, double z) const {
    if (source_disk_radius > 0.0 && t.grid.contains(x, z)) {
      const double d = std::hypot(x - source_x, z - source_z);
      if (d <= source_disk_radius) return d / source_c;
    }
    return sample_bilinear(t, x, z);
  }
};

/// Diagnostics from a single solve.
struct FmStats {
  std::size_t accepted_from_heap = 0;
  std::size_t heap_pops = 0;
  bool monotone_accept_order = true;  // accepted times never decreased
};

/// Solves |grad t| = 1/c(x,z) from a point source with the fast-marching
/// method (min-heap order, first-order upwind Godunov update, 4-connected
/// neighbors). Throws std::invalid_argument if the source lies outside the
/// grid or the disk radius is below max(dx, dz).
TravelTimeField solve_eikonal(const SosMap& sos, double source_x,
                              double source_z, const FmConfig& cfg = {},
                              FmStats* stats = nullptr);

/// One receive field per array element, source at (element_x[i], 0).
/// Solves are independent and run on `threads` workers.
std::vector<TravelTimeField> solve_receive_fields(const SosMap& sos,
                                                  const TransducerArray& array,
                                                  const FmConfig& cfg = {},
                                                  int threads = 1);

/// Process-wide count of completed eikonal solves, for budget assertions.
std::uint64_t eikonal_solve_count();
void reset_eikonal_solve_count();

}  // namespace eikr

#endif
