#pragma once

#include <string>

#include "eikr/beamform.hpp"

namespace eikr {

// Channel-data container format: "EIKF" magic, version, M / N_c / N_t (u32),
// fs and t0 (f64), array geometry (n_elements u32, pitch/f0/c_ref f64,
// element x positions f64), the transmit event list (indices u32, center and
// focus f64, apodization f32), then float32 traces ordered [event][element][t].
// Little-endian throughout.
inline constexpr char kRfMagic[4] = {'E', 'I', 'K', 'F'};
inline constexpr std::uint32_t kRfVersion = 1;

void write_rf(const std::string& path, const RfDataSet& rf);
RfDataSet read_rf(const std::string& path);

// 8-bit binary PGM of a log-compressed image: floor_db maps to 0 and 0 dB to
// 255. Pixels are written row by row with depth increasing downward.
void write_pgm(const std::string& path, const FieldD& log_db,
               double floor_db = -60.0);

}  // namespace eikr
