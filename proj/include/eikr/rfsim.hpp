#pragma once

#include <cstdint>

#include "eikr/beamform.hpp"
#include "eikr/phantom.hpp"

namespace eikr {

// Gaussian-modulated cosine burst, unit peak at t = 0, truncated at three
// envelope standard deviations. The envelope width is set so the -6 dB
// spectral width equals fractional_bandwidth * f0.
struct PulseSpec {
  double f0 = 3e6;
  double fractional_bandwidth = 0.6;
};

double pulse_sigma_t(const PulseSpec& pulse);
double pulse_waveform(const PulseSpec& pulse, double t);

enum class TruthDelayModel { kFmTrueSos, kGeometricConstantC };

TruthDelayModel parse_truth_delay_model(const std::string& name);

struct SimConfig {
  double fs = 0.0;  // 0 picks 4 * f0 * (1 + bandwidth)
  TruthDelayModel truth_delay_model = TruthDelayModel::kFmTrueSos;
  double noise_std = 0.0;
  std::uint64_t noise_seed = 1;
  FmConfig fm;  // eikonal options when the truth model solves fields
  int threads = 1;
};

// Single-scattering time-of-flight synthesis: every (event, scatterer,
// element) triple contributes reflectivity * transmit-window weight * pulse
// shifted to the round-trip arrival time. Arrival times come from the truth
// delay model evaluated on the phantom's unsmoothed map, so beamforming with
// the same delay model inverts the synthesis exactly up to sampling.
RfDataSet simulate_rf(const Phantom& phantom, const TransducerArray& array,
                      const std::vector<TransmitEvent>& events,
                      const PulseSpec& pulse, const SimConfig& cfg);

}  // namespace eikr
