#ifndef EIKR_MEDIUM_HPP
#define EIKR_MEDIUM_HPP

#include <vector>

#include "eikr/grid.hpp"

namespace eikr {

/// Nominal tissue speed of sound used for wavelength and conventional delays.
inline constexpr double kReferenceSos = 1540.0;  // m/s

/// Speed-of-sound map over a Grid2D. Values are validated to a physical
/// sanity band on construction.
struct SosMap {
  FieldF c;
  double c_min = 0.0;
  double c_max = 0.0;

  const Grid2D& grid() const { return c.grid; }
  double at(int i, int k) const { return c.at(i, k); }
  double sample(double x, double z) const { return sample_bilinear(c, x, z); }
};

/// Builds and validates a SosMap; every value must be finite and within
/// [500, 5000] m/s.
SosMap make_sos_map(FieldF c);

/// Uniform map helper.
SosMap make_uniform_sos_map(const Grid2D& grid, double c);

/// Uniform linear array on the z = 0 line, centered at x = 0.
struct TransducerArray {
  int n_elements = 0;
  double pitch = 0.0;       // meters
  double f0 = 0.0;          // Hz
  double c_ref = kReferenceSos;
  double wavelength = 0.0;  // c_ref / f0
  std::vector<double> element_x;

  static constexpr double element_z = 0.0;
  double aperture_width() const { return (n_elements - 1) * pitch; }
};

TransducerArray make_array(int n_elements, double pitch, double f0,
                           double c_ref = kReferenceSos);

}  // namespace eikr

#endif
