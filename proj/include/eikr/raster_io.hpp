#ifndef EIKR_RASTER_IO_HPP
#define EIKR_RASTER_IO_HPP

#include <string>

#include "eikr/grid.hpp"

namespace eikr {

// Raster file layout (little-endian):
//   magic "EIKR" | version u32 | nx u32 | nz u32
//   origin_x f64 | origin_z f64 | dx f64 | dz f64
//   payload: nx*nz float32, z-major (x scanlines contiguous, z slowest)
inline constexpr char kRasterMagic[4] = {'E', 'I', 'K', 'R'};
inline constexpr std::uint32_t kRasterVersion = 1;

void write_raster(const std::string& path, const FieldF& field);
void write_raster(const std::string& path, const FieldD& field);
FieldF read_raster(const std::string& path);

}  // namespace eikr

#endif
