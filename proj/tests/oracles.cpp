#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

double fermat_two_layer(double x0, double x1, double z1, double z_if,
                        double c1, double c2, double scan_step) {
  if (z_if <= 0.0 || z1 <= z_if)
    throw std::invalid_argument("end point must lie below the interface");

  // The optimal crossing abscissa lies between the endpoints: moving it
  // outside lengthens both segments.
  const double lo = std::min(x0, x1);
  const double hi = std::max(x0, x1);
  const auto time_at = [&](double xc) {
    const double a = std::hypot(xc - x0, z_if);
    const double b = std::hypot(x1 - xc, z1 - z_if);
    return a / c1 + b / c2;
  };

  double best = time_at(lo);
  const long n = std::lround(std::ceil((hi - lo) / scan_step));
  for (long s = 1; s <= n; ++s) {
    const double xc = std::min(lo + s * scan_step, hi);
    best = std::min(best, time_at(xc));
  }
  return best;
}

eikr::FieldD naive_das(const eikr::RfDataSet& rf,
                       const eikr::DelayProvider& delays, double rx_f_number,
                       const eikr::Grid2D& pixels) {
  eikr::FieldD out(pixels, 0.0);
  const int m = delays.transmit_count();
  const int nc = delays.element_count();

  for (int k = 0; k < pixels.nz; ++k) {
    const double zp = pixels.z_at(k);
    const double half = zp / (2.0 * rx_f_number);
    if (!(half > 0.0)) continue;
    for (int i = 0; i < pixels.nx; ++i) {
      const double xp = pixels.x_at(i);
      double acc = 0.0;
      for (int j = 0; j < m; ++j) {
        const double t_tx = delays.tx_delay(j, xp, zp);
        for (int e = 0; e < nc; ++e) {
          const double xe = rf.array.element_x[e];
          if (xe < xp - half || xe > xp + half) continue;
          const double u = (xe - xp) / half;
          const double w =
              0.5 * (1.0 + std::cos(std::numbers::pi * u));
          const double t = t_tx + delays.rx_delay(e, xp, zp);
          const double fidx = (t - rf.t0) * rf.fs;
          if (fidx < 0.0 || fidx > rf.n_samples - 1.0) continue;
          const float* trace = rf.samples.data() + rf.trace_offset(j, e);
          const auto i0 = static_cast<std::size_t>(fidx);
          double v;
          if (i0 + 1 >= rf.n_samples) {
            v = trace[rf.n_samples - 1];
          } else {
            const double f = fidx - static_cast<double>(i0);
            v = trace[i0] + f * (trace[i0 + 1] - trace[i0]);
          }
          acc += w * v;
        }
      }
      out.at(i, k) = acc;
    }
  }
  return out;
}

std::vector<double> naive_analytic_envelope(const std::vector<double>& x) {
  const std::size_t n = x.size();
  using cd = std::complex<double>;
  const cd j(0.0, 1.0);
  const double twopi = 2.0 * std::numbers::pi;

  std::vector<cd> spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd s = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      s += x[t] * std::exp(-j * (twopi * k * t / static_cast<double>(n)));
    spec[k] = s;
  }

  // one-sided doubling: keep DC (and Nyquist for even n), double positive
  // frequencies, drop negative ones
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;

  std::vector<double> env(n);
  for (std::size_t t = 0; t < n; ++t) {
    cd s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += spec[k] * std::exp(j * (twopi * k * t / static_cast<double>(n)));
    env[t] = std::abs(s) / static_cast<double>(n);
  }
  return env;
}

}  // namespace oracle
