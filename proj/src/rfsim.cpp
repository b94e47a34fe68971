#include "eikr/rfsim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "eikr/delays.hpp"
#include "eikr/parallel.hpp"

namespace eikr {

double pulse_sigma_t(const PulseSpec& pulse) {
  // -6 dB (half-amplitude) spectral width bw*f0 -> Gaussian sigma_f, then
  // the time-domain envelope sigma is its Fourier pair
  const double sigma_f = pulse.fractional_bandwidth * pulse.f0 /
                         (2.0 * std::sqrt(2.0 * std::log(2.0)));
  return 1.0 / (2.0 * std::numbers::pi * sigma_f);
}

double pulse_waveform(const PulseSpec& pulse, double t) {
  if (pulse.f0 <= 0.0) throw std::invalid_argument("pulse f0 must be positive");
  if (pulse.fractional_bandwidth <= 0.0 || pulse.fractional_bandwidth >= 1.0)
    throw std::invalid_argument("fractional bandwidth outside (0, 1)");
  const double sigma = pulse_sigma_t(pulse);
  if (std::abs(t) > 3.0 * sigma) return 0.0;
  return std::exp(-0.5 * t * t / (sigma * sigma)) *
         std::cos(2.0 * std::numbers::pi * pulse.f0 * t);
}

TruthDelayModel parse_truth_delay_model(const std::string& name) {
  if (name == "fm_true_sos") return TruthDelayModel::kFmTrueSos;
  if (name == "geometric_constant_c") return TruthDelayModel::kGeometricConstantC;
  throw std::invalid_argument("unknown truth delay model: " + name);
}

RfDataSet simulate_rf(const Phantom& phantom, const TransducerArray& array,
                      const std::vector<TransmitEvent>& events,
                      const PulseSpec& pulse, const SimConfig& cfg) {
  if (events.empty()) throw std::invalid_argument("no transmit events");
  const Grid2D& g = phantom.sos.grid();
  for (const Scatterer& s : phantom.scatterers)
    if (!g.contains(s.x, s.z))
      throw std::invalid_argument("scatterer outside the phantom map");

  const double band = pulse.f0 * (1.0 + pulse.fractional_bandwidth);
  const double fs = cfg.fs > 0.0 ? cfg.fs : 4.0 * band;
  if (fs <= 2.0 * band)
    throw std::invalid_argument("sampling rate below the rf band");
  const double sigma = pulse_sigma_t(pulse);

  // delay model on the ground-truth map; geometric uses the array reference c
  std::unique_ptr<DelayProvider> provider;
  if (cfg.truth_delay_model == TruthDelayModel::kFmTrueSos) {
    provider = std::make_unique<FmDelayProvider>(phantom.sos, array, events,
                                                 cfg.fm, cfg.threads);
  } else {
    provider =
        std::make_unique<GeometricDelayProvider>(array, events, array.c_ref);
  }

  // recording window: the longest virtual-source transmit plus receive path
  // both bounded by the grid diagonal, plus the pulse tail
  const double diag = std::hypot(g.width(), g.depth());
  const double t_end = 3.0 * diag / phantom.sos.c_min + 4.0 * sigma;
  const std::uint32_t n_samples =
      static_cast<std::uint32_t>(std::ceil(t_end * fs)) + 1;

  RfDataSet rf;
  rf.array = array;
  rf.events = events;
  rf.n_samples = n_samples;
  rf.fs = fs;
  rf.t0 = 0.0;
  rf.samples.assign(events.size() * array.element_x.size() * n_samples, 0.0f);

  // events own disjoint trace ranges, so parallel accumulation stays
  // deterministic for any thread count
  parallel_for(events.size(), cfg.threads, [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      const TransmitEvent& ev = events[j];
      for (const Scatterer& s : phantom.scatterers) {
        if (s.reflectivity == 0.0f) continue;
        const double tx_tau = provider->tx_delay(static_cast<int>(j), s.x, s.z);

        // transmit weight: window value of the aperture element closest to
        // the scatterer's lateral position
        const double x0 = array.element_x[ev.first_element];
        int nearest = static_cast<int>(std::lround((s.x - x0) / array.pitch));
        nearest = std::clamp(nearest, 0, ev.n_aperture - 1);
        const double w_tx = ev.apodization[nearest];
        if (w_tx == 0.0) continue;
        const double amp = static_cast<double>(s.reflectivity) * w_tx;

        for (int i = 0; i < array.n_elements; ++i) {
          const double t_arrive = tx_tau + provider->rx_delay(i, s.x, s.z);
          const std::size_t off = rf.trace_offset(j, static_cast<std::size_t>(i));
          const auto n_lo = static_cast<std::int64_t>(
              std::ceil((t_arrive - 3.0 * sigma) * fs));
          const auto n_hi = static_cast<std::int64_t>(
              std::floor((t_arrive + 3.0 * sigma) * fs));
          for (std::int64_t n = std::max<std::int64_t>(0, n_lo);
               n <= std::min<std::int64_t>(n_samples - 1, n_hi); ++n) {
            rf.samples[off + static_cast<std::size_t>(n)] += static_cast<float>(
                amp * pulse_waveform(pulse, n / fs - t_arrive));
          }
        }
      }
    }
  });

  if (cfg.noise_std > 0.0) {
    std::mt19937_64 rng(cfg.noise_seed);
    std::normal_distribution<double> gauss(0.0, cfg.noise_std);
    for (float& v : rf.samples) v += static_cast<float>(gauss(rng));
  }
  return rf;
}

}  // namespace eikr
