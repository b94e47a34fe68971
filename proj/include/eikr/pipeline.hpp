#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eikr/beamform.hpp"
#include "eikr/metrics.hpp"
#include "eikr/phantom.hpp"
#include "eikr/rfsim.hpp"

namespace eikr {

// Everything a full run needs, validated before any compute starts. All
// lengths are meters, frequencies Hz. Defaults describe the desk-scale setup
// that finishes in seconds; the full clinical geometry is a config file away.
struct PipelineConfig {
  std::vector<std::string> scenarios = {"M1", "M2", "M3", "M4"};
  std::uint64_t seed = 1;

  // simulation grid
  double grid_width = 19.2e-3;
  double grid_depth = 60e-3;
  double grid_dx = 150e-6;
  double grid_dz = 150e-6;

  // transducer
  int n_elements = 64;
  double pitch = 0.3e-3;
  double f0 = 3e6;
  double c_ref = kReferenceSos;

  // transmit scheme
  int n_transmits = 32;
  double focal_depth = 30e-3;
  double tx_f_number = 2.0;

  double fractional_bandwidth = 0.6;
  ApodizationSpec apodization;

  // SoS preprocessing before the fm-das solves
  int median_radius = 2;
  double smooth_sigma = 2.0;

  // beamforming pixel grid (same extent as the simulation grid)
  double pixel_dx = 150e-6;
  double pixel_dz = 75e-6;

  // rf synthesis
  double fs = 0.0;  // 0 = rfsim default
  std::string truth_delay_model = "fm_true_sos";
  double noise_std = 0.0;
  bool speckle = true;
  int speckle_stride = 2;

  std::vector<std::string> methods = {"das", "fm-das"};
  double dynamic_range_db = 60.0;
  int threads = 1;

  Grid2D make_grid() const;
  Grid2D make_pixel_grid() const;
  TransducerArray make_array() const;
  std::vector<TransmitEvent> make_events(const TransducerArray& array) const;
  PulseSpec make_pulse() const;
  SimConfig make_sim_config() const;
};

// Parses and validates; unknown keys and out-of-range values are errors.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_json(const PipelineConfig& cfg);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);

struct StageOutput {
  std::string path;
  std::string hash;  // fnv-1a 64 of the file bytes, hex
};

struct StageRecord {
  std::string name;
  double wall_seconds = 0.0;
  std::vector<StageOutput> outputs;
};

// Written atomically (temp file + rename) when the run completes. Output
// hashes are reproducible for identical config + seed; wall times are not.
struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::vector<StageRecord> stages;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

// phantom -> rf -> per-method images -> metrics -> report.csv + manifest.json
// under out_dir. Throws with the failing stage's name on error.
RunManifest run_pipeline(const PipelineConfig& cfg, const std::string& out_dir);

}  // namespace eikr
