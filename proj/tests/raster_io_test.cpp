#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "eikr/raster_io.hpp"

using namespace eikr;
namespace fs = std::filesystem;

namespace {

// unique scratch path per call; cleaned up by the caller
std::string scratch(const std::string& stem) {
  static int counter = 0;
  return (fs::temp_directory_path() /
          (stem + "_" + std::to_string(++counter) + ".eikr"))
      .string();
}

}  // namespace

TEST_SUITE("raster_io") {

TEST_CASE("float rasters round-trip bit for bit") {
  const Grid2D g = make_grid(-5e-3, 1e-3, 75e-6, 80e-6, 17, 9);
  FieldF f(g);
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(-10.0f, 10.0f);
  for (float& v : f.v) v = u(rng);

  const std::string p = scratch("roundtrip");
  write_raster(p, f);
  const FieldF back = read_raster(p);
  fs::remove(p);

  CHECK(back.grid == g);
  REQUIRE(back.v.size() == f.v.size());
  for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(back.v[i] == f.v[i]);
}

TEST_CASE("double rasters narrow to float on write") {
  const Grid2D g = make_grid(0.0, 0.0, 1e-3, 1e-3, 3, 2);
  FieldD d(g);
  d.at(1, 0) = 0.123456789012345;  // more precision than float carries
  d.at(2, 1) = -7.5;

  const std::string p = scratch("narrow");
  write_raster(p, d);
  const FieldF back = read_raster(p);
  fs::remove(p);

  CHECK(back.at(1, 0) == static_cast<float>(0.123456789012345));
  CHECK(back.at(2, 1) == -7.5f);
}

TEST_CASE("corrupted files are rejected") {
  const Grid2D g = make_grid(0.0, 0.0, 1e-3, 1e-3, 4, 4);
  FieldF f(g, 1.0f);
  const std::string p = scratch("corrupt");
  write_raster(p, f);

  SUBCASE("wrong magic") {
    std::fstream s(p, std::ios::in | std::ios::out | std::ios::binary);
    s.seekp(0);
    s.write("JUNK", 4);
    s.close();
    CHECK_THROWS_AS(read_raster(p), std::runtime_error);
  }

  SUBCASE("unsupported version") {
    std::fstream s(p, std::ios::in | std::ios::out | std::ios::binary);
    s.seekp(4);
    const std::uint32_t v = 999;
    s.write(reinterpret_cast<const char*>(&v), sizeof v);
    s.close();
    CHECK_THROWS_AS(read_raster(p), std::runtime_error);
  }

  SUBCASE("truncated payload") {
    const auto full = fs::file_size(p);
    fs::resize_file(p, full - 7);
    CHECK_THROWS_AS(read_raster(p), std::runtime_error);
  }

  SUBCASE("missing file") {
    fs::remove(p);
    CHECK_THROWS_AS(read_raster(p), std::runtime_error);
  }

  fs::remove(p);
}

}  // TEST_SUITE
