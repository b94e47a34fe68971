#include "eikr/raster_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace eikr {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_header(std::ostream& os, const Grid2D& g) {
  os.write(kRasterMagic, 4);
  put_u32(os, kRasterVersion);
  put_u32(os, static_cast<std::uint32_t>(g.nx));
  put_u32(os, static_cast<std::uint32_t>(g.nz));
  put_f64(os, g.origin_x);
  put_f64(os, g.origin_z);
  put_f64(os, g.dx);
  put_f64(os, g.dz);
}

}  // namespace

void write_raster(const std::string& path, const FieldF& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_header(os, field.grid);
  os.write(reinterpret_cast<const char*>(field.v.data()),
           static_cast<std::streamsize>(field.v.size() * sizeof(float)));
  if (!os) throw std::runtime_error("short write: " + path);
}

void write_raster(const std::string& path, const FieldD& field) {
  FieldF f(field.grid);
  for (std::size_t n = 0; n < field.v.size(); ++n)
    f.v[n] = static_cast<float>(field.v[n]);
  write_raster(path, f);
}

FieldF read_raster(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRasterMagic, 4) != 0)
    throw std::runtime_error("not a raster file: " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kRasterVersion)
    throw std::runtime_error("unsupported raster version in " + path);
  const std::uint32_t nx = get_u32(is);
  const std::uint32_t nz = get_u32(is);
  const double ox = get_f64(is);
  const double oz = get_f64(is);
  const double dx = get_f64(is);
  const double dz = get_f64(is);
  if (!is) throw std::runtime_error("truncated raster header: " + path);
  FieldF f(make_grid(ox, oz, dx, dz, static_cast<int>(nx), static_cast<int>(nz)));
  is.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(float)));
  if (!is) throw std::runtime_error("truncated raster payload: " + path);
  return f;
}

}  // namespace eikr
