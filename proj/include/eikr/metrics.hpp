#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eikr/grid.hpp"

namespace eikr {

// Per-target outcome of the geometric distortion score. A target scores 1
// only when the envelope peak and both -6 dB lateral endpoints all fall
// within one wavelength of the true position.
struct GdsTarget {
  std::array<double, 2> truth{};
  std::array<double, 2> peak{};  // sub-pixel refined envelope maximum
  double left_x = 0.0;           // -6 dB endpoints at the peak depth
  double right_x = 0.0;
  bool found = false;  // peak rose above the -60 dB image floor
  int score = 0;
};

struct GdsReport {
  std::vector<GdsTarget> targets;
  double mean = 0.0;
};

// Searches a (2*search_radius)^2 window around each true position; passing
// search_radius 0 uses the 2.5-wavelength default.
GdsReport gds(const FieldD& envelope,
              const std::vector<std::array<double, 2>>& targets,
              double wavelength, double search_radius = 0.0);

struct GcnrReport {
  double gcnr = 0.0;
  int n_bins = 0;
  std::size_t n_cyst = 0;
  std::size_t n_background = 0;
};

// Overlap complement of the two regions' envelope-amplitude histograms over
// a shared [0, max] range: 1 - sum_bins min(f_cyst, f_background).
GcnrReport gcnr(const FieldD& envelope,
                const std::vector<std::uint8_t>& cyst_mask,
                const std::vector<std::uint8_t>& background_mask,
                int n_bins = 100);

// One comparison row: a beamforming method evaluated on a scenario.
struct MethodResult {
  std::string method;
  std::string scenario;
  double mean_gds = 0.0;
  std::vector<std::pair<std::string, double>> gcnr_per_cyst;
};

// CSV with one row per (method, scenario) and one gcnr column per cyst
// label. Methods must cover identical scenario and label sets.
std::string compare_report(const std::vector<MethodResult>& results);

}  // namespace eikr
