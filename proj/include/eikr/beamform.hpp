#pragma once

#include <cstdint>
#include <vector>

#include "eikr/delays.hpp"
#include "eikr/grid.hpp"
#include "eikr/medium.hpp"

namespace eikr {

// One acquisition: every transmit event's per-element receive traces at a
// common sampling rate. Sample 0 of every trace sits at time t0 relative to
// the moment the event's wavefront leaves the aperture center.
struct RfDataSet {
  TransducerArray array;
  std::vector<TransmitEvent> events;
  std::uint32_t n_samples = 0;
  double fs = 0.0;
  double t0 = 0.0;
  std::vector<float> samples;  // [event][element][sample]

  std::size_t transmit_count() const { return events.size(); }
  std::size_t element_count() const { return array.element_x.size(); }
  std::size_t trace_offset(std::size_t event, std::size_t element) const {
    return (event * element_count() + element) * n_samples;
  }
};

struct ApodizationSpec {
  double rx_f_number = 2.0;
  // When positive, each transmit only contributes inside an hourglass around
  // its beam axis with this F-number; 0 keeps the all-pixel compounding.
  double tx_gate_f_number = 0.0;
};

struct BeamformedImage {
  Grid2D pixel_grid;
  FieldD rf_sum;
  FieldD envelope;
  FieldD log_db;
};

// Delay-and-sum of every (transmit, element) trace into pixel space. Traces
// are read by linear interpolation at (tx_delay + rx_delay - t0) * fs;
// out-of-range times contribute nothing. Receive weighting is a hanning
// window over the dynamic aperture |x_i - x_p| <= z_p / (2 * rx F-number).
FieldD das_beamform(const RfDataSet& rf, const DelayProvider& provider,
                    const ApodizationSpec& apod, const Grid2D& pixel_grid,
                    int threads = 1);

// Per-column magnitude of the analytic signal (one-sided spectrum doubling
// along the axial direction). Needs at least 4 axial samples.
FieldD envelope_detect(const FieldD& rf_sum, int threads = 1);

// 20*log10(envelope / max), clamped to [-dynamic_range_db, 0]. The image max
// maps to 0 dB exactly; an all-zero envelope has no reference and is an error.
FieldD log_compress(const FieldD& envelope, double dynamic_range_db = 60.0);

// Median filter (square window, edge-replicated) followed by a separable
// Gaussian blur, both in node units; radius 0 / sigma 0 skip the stage.
SosMap preprocess_sos(const SosMap& map, int median_radius,
                      double smooth_sigma_nodes);

// Convenience composition of the three imaging stages.
BeamformedImage beamform_image(const RfDataSet& rf,
                               const DelayProvider& provider,
                               const ApodizationSpec& apod,
                               const Grid2D& pixel_grid,
                               double dynamic_range_db = 60.0,
                               int threads = 1);

}  // namespace eikr
