#include "eikr/beamform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "eikr/parallel.hpp"

namespace eikr {

namespace {

void check_geometry(const RfDataSet& rf, const DelayProvider& provider) {
  if (rf.fs <= 0.0) throw std::invalid_argument("rf sampling rate must be positive");
  if (rf.n_samples == 0) throw std::invalid_argument("rf data has no samples");
  const std::size_t expect =
      rf.transmit_count() * rf.element_count() * rf.n_samples;
  if (rf.samples.size() != expect)
    throw std::invalid_argument("rf sample buffer does not match geometry");
  if (provider.transmit_count() != static_cast<int>(rf.transmit_count()) ||
      provider.element_count() != static_cast<int>(rf.element_count()))
    throw std::invalid_argument("delay provider does not match rf geometry");
}

// FFTW's planner mutates global state; only fftw_execute is thread-safe
std::mutex g_fftw_plan_mutex;

// linear interpolation into one trace; zero outside the recorded window
inline double read_trace(const float* trace, std::uint32_t n, double fidx) {
  if (fidx < 0.0 || fidx > n - 1.0) return 0.0;
  const std::size_t i0 = static_cast<std::size_t>(fidx);
  if (i0 + 1 >= n) return trace[n - 1];
  const double frac = fidx - static_cast<double>(i0);
  return trace[i0] + frac * (trace[i0 + 1] - trace[i0]);
}

}  // namespace

FieldD das_beamform(const RfDataSet& rf, const DelayProvider& provider,
                    const ApodizationSpec& apod, const Grid2D& pixel_grid,
                    int threads) {
  check_geometry(rf, provider);
  if (apod.rx_f_number <= 0.0)
    throw std::invalid_argument("receive F-number must be positive");

  const std::size_t m = rf.transmit_count();
  const std::size_t nc = rf.element_count();
  const std::vector<double>& ex = rf.array.element_x;

  FieldD out(pixel_grid);
  parallel_for(pixel_grid.nz, threads, [&](std::size_t kb, std::size_t ke) {
    std::vector<double> rx_tau(nc);
    std::vector<double> weight(nc);
    for (std::size_t k = kb; k < ke; ++k) {
      const double z = pixel_grid.z_at(static_cast<int>(k));
      const double half_ap = z / (2.0 * apod.rx_f_number);
      if (!(half_ap > 0.0)) continue;  // surface row: aperture degenerates
      for (int i = 0; i < pixel_grid.nx; ++i) {
        const double x = pixel_grid.x_at(i);

        // dynamic receive aperture: contiguous element run around the pixel
        auto lo = std::lower_bound(ex.begin(), ex.end(), x - half_ap);
        auto hi = std::upper_bound(ex.begin(), ex.end(), x + half_ap);
        const std::size_t e0 = static_cast<std::size_t>(lo - ex.begin());
        const std::size_t e1 = static_cast<std::size_t>(hi - ex.begin());
        if (e0 >= e1) continue;

        for (std::size_t e = e0; e < e1; ++e) {
          rx_tau[e] = provider.rx_delay(static_cast<int>(e), x, z);
          const double u = (ex[e] - x) / half_ap;
          weight[e] = 0.5 * (1.0 + std::cos(std::numbers::pi * u));
        }

        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (apod.tx_gate_f_number > 0.0) {
            const TransmitEvent& ev = rf.events[j];
            const double gate = std::max(
                rf.array.pitch,
                std::abs(z - ev.focus_z) / (2.0 * apod.tx_gate_f_number));
            if (std::abs(x - ev.focus_x) > gate) continue;
          }
          const double tx_tau = provider.tx_delay(static_cast<int>(j), x, z);
          const float* base = rf.samples.data() + rf.trace_offset(j, e0);
          for (std::size_t e = e0; e < e1; ++e) {
            const double fidx = (tx_tau + rx_tau[e] - rf.t0) * rf.fs;
            acc += weight[e] * read_trace(base + (e - e0) * rf.n_samples,
                                          rf.n_samples, fidx);
          }
        }
        out.v[pixel_grid.idx(i, static_cast<int>(k))] = acc;
      }
    }
  });
  return out;
}

FieldD envelope_detect(const FieldD& rf_sum, int threads) {
  const Grid2D& g = rf_sum.grid;
  if (g.nz < 4)
    throw std::invalid_argument("envelope detection needs at least 4 axial samples");

  const int n = g.nz;
  FieldD out(g);

  parallel_for(g.nx, threads, [&](std::size_t ib, std::size_t ie) {
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan fwd, bwd;
    {
      // ESTIMATE keeps planning deterministic run to run
      std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
      fwd = fftw_plan_dft_1d(n, buf, spec, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_1d(n, spec, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    for (std::size_t i = ib; i < ie; ++i) {
      for (int k = 0; k < n; ++k) {
        buf[k][0] = rf_sum.v[g.idx(static_cast<int>(i), k)];
        buf[k][1] = 0.0;
      }
      fftw_execute(fwd);
      // analytic signal: keep DC (and Nyquist when n is even), double the
      // positive band, zero the negative band
      const int half = n / 2;
      for (int k = 1; k < (n + 1) / 2; ++k) {
        spec[k][0] *= 2.0;
        spec[k][1] *= 2.0;
      }
      for (int k = half + 1; k < n; ++k) {
        spec[k][0] = 0.0;
        spec[k][1] = 0.0;
      }
      fftw_execute(bwd);
      for (int k = 0; k < n; ++k) {
        const double re = buf[k][0] / n;
        const double im = buf[k][1] / n;
        out.v[g.idx(static_cast<int>(i), k)] = std::sqrt(re * re + im * im);
      }
    }

    {
      std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
    }
    fftw_free(buf);
    fftw_free(spec);
  });
  return out;
}

FieldD log_compress(const FieldD& envelope, double dynamic_range_db) {
  if (dynamic_range_db <= 0.0)
    throw std::invalid_argument("dynamic range must be positive");
  const double peak = *std::max_element(envelope.v.begin(), envelope.v.end());
  if (!(peak > 0.0))
    throw std::invalid_argument("cannot log-compress an all-zero envelope");

  FieldD out(envelope.grid);
  for (std::size_t i = 0; i < envelope.v.size(); ++i) {
    const double v = envelope.v[i];
    double db = v > 0.0 ? 20.0 * std::log10(v / peak) : -dynamic_range_db;
    out.v[i] = std::clamp(db, -dynamic_range_db, 0.0);
  }
  return out;
}

SosMap preprocess_sos(const SosMap& map, int median_radius,
                      double smooth_sigma_nodes) {
  if (median_radius < 0 || smooth_sigma_nodes < 0.0)
    throw std::invalid_argument("filter sizes must be non-negative");

  const Grid2D& g = map.c.grid;
  std::vector<float> cur = map.c.v;

  if (median_radius > 0) {
    const int r = median_radius;
    std::vector<float> win;
    win.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
    std::vector<float> next(cur.size());
    for (int k = 0; k < g.nz; ++k) {
      for (int i = 0; i < g.nx; ++i) {
        win.clear();
        for (int dk = -r; dk <= r; ++dk) {
          const int kk = std::clamp(k + dk, 0, g.nz - 1);
          for (int di = -r; di <= r; ++di) {
            const int ii = std::clamp(i + di, 0, g.nx - 1);
            win.push_back(cur[g.idx(ii, kk)]);
          }
        }
        auto mid = win.begin() + win.size() / 2;
        std::nth_element(win.begin(), mid, win.end());
        next[g.idx(i, k)] = *mid;
      }
    }
    cur.swap(next);
  }

  if (smooth_sigma_nodes > 0.0) {
    const int r = static_cast<int>(std::ceil(3.0 * smooth_sigma_nodes));
    std::vector<double> kernel(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int d = -r; d <= r; ++d) {
      kernel[d + r] = std::exp(-0.5 * d * d /
                               (smooth_sigma_nodes * smooth_sigma_nodes));
      sum += kernel[d + r];
    }
    for (double& w : kernel) w /= sum;

    std::vector<float> tmp(cur.size());
    for (int k = 0; k < g.nz; ++k) {
      for (int i = 0; i < g.nx; ++i) {
        double acc = 0.0;
        for (int d = -r; d <= r; ++d)
          acc += kernel[d + r] * cur[g.idx(std::clamp(i + d, 0, g.nx - 1), k)];
        tmp[g.idx(i, k)] = static_cast<float>(acc);
      }
    }
    for (int k = 0; k < g.nz; ++k) {
      for (int i = 0; i < g.nx; ++i) {
        double acc = 0.0;
        for (int d = -r; d <= r; ++d)
          acc += kernel[d + r] * tmp[g.idx(i, std::clamp(k + d, 0, g.nz - 1))];
        cur[g.idx(i, k)] = static_cast<float>(acc);
      }
    }
  }

  FieldF f(g);
  f.v = std::move(cur);
  return make_sos_map(std::move(f));
}

BeamformedImage beamform_image(const RfDataSet& rf,
                               const DelayProvider& provider,
                               const ApodizationSpec& apod,
                               const Grid2D& pixel_grid,
                               double dynamic_range_db, int threads) {
  BeamformedImage img;
  img.pixel_grid = pixel_grid;
  img.rf_sum = das_beamform(rf, provider, apod, pixel_grid, threads);
  img.envelope = envelope_detect(img.rf_sum, threads);
  img.log_db = log_compress(img.envelope, dynamic_range_db);
  return img;
}

}  // namespace eikr
