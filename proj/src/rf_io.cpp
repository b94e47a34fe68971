#include "eikr/rf_io.hpp"

#include <algorithm>
#include <cmath>
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

}  // namespace

void write_rf(const std::string& path, const RfDataSet& rf) {
  const std::size_t expect =
      rf.transmit_count() * rf.element_count() * rf.n_samples;
  if (rf.samples.size() != expect)
    throw std::invalid_argument("rf sample buffer does not match geometry");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);

  os.write(kRfMagic, 4);
  put_u32(os, kRfVersion);
  put_u32(os, static_cast<std::uint32_t>(rf.transmit_count()));
  put_u32(os, static_cast<std::uint32_t>(rf.element_count()));
  put_u32(os, rf.n_samples);
  put_f64(os, rf.fs);
  put_f64(os, rf.t0);

  put_u32(os, static_cast<std::uint32_t>(rf.array.n_elements));
  put_f64(os, rf.array.pitch);
  put_f64(os, rf.array.f0);
  put_f64(os, rf.array.c_ref);
  for (double x : rf.array.element_x) put_f64(os, x);

  for (const TransmitEvent& ev : rf.events) {
    put_u32(os, static_cast<std::uint32_t>(ev.index));
    put_u32(os, static_cast<std::uint32_t>(ev.first_element));
    put_u32(os, static_cast<std::uint32_t>(ev.n_aperture));
    put_f64(os, ev.center_x);
    put_f64(os, ev.center_z);
    put_f64(os, ev.focus_x);
    put_f64(os, ev.focus_z);
    os.write(reinterpret_cast<const char*>(ev.apodization.data()),
             static_cast<std::streamsize>(ev.apodization.size() * sizeof(float)));
  }

  os.write(reinterpret_cast<const char*>(rf.samples.data()),
           static_cast<std::streamsize>(rf.samples.size() * sizeof(float)));
  if (!os) throw std::runtime_error("short write: " + path);
}

RfDataSet read_rf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);

  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRfMagic, 4) != 0)
    throw std::runtime_error("not an rf container: " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kRfVersion)
    throw std::runtime_error("unsupported rf container version in " + path);

  const std::uint32_t m = get_u32(is);
  const std::uint32_t nc = get_u32(is);
  const std::uint32_t nt = get_u32(is);
  const double fs = get_f64(is);
  const double t0 = get_f64(is);
  if (!is || m == 0 || nc == 0 || nt == 0 || fs <= 0.0)
    throw std::runtime_error("corrupt rf header in " + path);

  const std::uint32_t n_elem = get_u32(is);
  const double pitch = get_f64(is);
  const double f0 = get_f64(is);
  const double c_ref = get_f64(is);
  if (!is || n_elem != nc)
    throw std::runtime_error("rf geometry mismatch in " + path);

  RfDataSet rf;
  rf.array = make_array(static_cast<int>(n_elem), pitch, f0, c_ref);
  for (std::uint32_t i = 0; i < n_elem; ++i) {
    const double x = get_f64(is);
    if (std::abs(x - rf.array.element_x[i]) > 1e-9)
      throw std::runtime_error("rf element positions inconsistent in " + path);
  }

  rf.events.resize(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    TransmitEvent& ev = rf.events[j];
    ev.index = static_cast<int>(get_u32(is));
    ev.first_element = static_cast<int>(get_u32(is));
    const std::uint32_t nap = get_u32(is);
    if (!is || nap == 0 || ev.first_element + nap > n_elem)
      throw std::runtime_error("corrupt transmit event in " + path);
    ev.n_aperture = static_cast<int>(nap);
    ev.center_x = get_f64(is);
    ev.center_z = get_f64(is);
    ev.focus_x = get_f64(is);
    ev.focus_z = get_f64(is);
    ev.apodization.resize(nap);
    is.read(reinterpret_cast<char*>(ev.apodization.data()),
            static_cast<std::streamsize>(nap * sizeof(float)));
  }

  rf.n_samples = nt;
  rf.fs = fs;
  rf.t0 = t0;
  rf.samples.resize(static_cast<std::size_t>(m) * nc * nt);
  is.read(reinterpret_cast<char*>(rf.samples.data()),
          static_cast<std::streamsize>(rf.samples.size() * sizeof(float)));
  if (!is || is.gcount() !=
                 static_cast<std::streamsize>(rf.samples.size() * sizeof(float)))
    throw std::runtime_error("truncated rf payload in " + path);
  return rf;
}

void write_pgm(const std::string& path, const FieldD& log_db, double floor_db) {
  if (floor_db >= 0.0) throw std::invalid_argument("pgm floor must be negative");
  const Grid2D& g = log_db.grid;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "P5\n" << g.nx << " " << g.nz << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.nx));
  for (int k = 0; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = std::clamp(log_db.v[g.idx(i, k)], floor_db, 0.0);
      row[static_cast<std::size_t>(i)] =
          static_cast<unsigned char>(std::lround(255.0 * (1.0 - v / floor_db)));
    }
    os.write(reinterpret_cast<const char*>(row.data()), g.nx);
  }
  if (!os) throw std::runtime_error("short write: " + path);
}

}  // namespace eikr
