#include "eikr/medium.hpp"

#include <cmath>
#include <limits>

namespace eikr {

SosMap make_sos_map(FieldF c) {
  if (c.v.size() != c.grid.size())
    throw std::invalid_argument("SoS field size does not match its grid");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (float v : c.v) {
    if (!std::isfinite(v) || v < 500.0f || v > 5000.0f)
      throw std::invalid_argument("SoS value outside [500, 5000] m/s");
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  return SosMap{std::move(c), lo, hi};
}

SosMap make_uniform_sos_map(const Grid2D& grid, double c) {
  FieldF f(grid, static_cast<float>(c));
  return make_sos_map(std::move(f));
}

TransducerArray make_array(int n_elements, double pitch, double f0,
                           double c_ref) {
  if (n_elements < 2)
    throw std::invalid_argument("array needs at least 2 elements");
  if (!(pitch > 0.0) || !(f0 > 0.0) || !(c_ref > 0.0))
    throw std::invalid_argument("pitch, f0 and c_ref must be positive");
  TransducerArray a;
  a.n_elements = n_elements;
  a.pitch = pitch;
  a.f0 = f0;
  a.c_ref = c_ref;
  a.wavelength = c_ref / f0;
  a.element_x.resize(n_elements);
  const double half = (n_elements - 1) * pitch / 2.0;
  for (int i = 0; i < n_elements; ++i) a.element_x[i] = i * pitch - half;
  return a;
}

}  // namespace eikr
