#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "eikr/grid.hpp"

using namespace eikr;

TEST_SUITE("grid") {

TEST_CASE("make_grid validates spacing and node counts") {
  CHECK_NOTHROW(make_grid(0.0, 0.0, 1e-3, 1e-3, 2, 2));
  CHECK_THROWS_AS(make_grid(0.0, 0.0, 0.0, 1e-3, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 0.0, 1e-3, -1e-3, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 0.0, 1e-3, 1e-3, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 0.0, 1e-3, 1e-3, 4, 0), std::invalid_argument);
}

TEST_CASE("centered grid spans the requested extent symmetrically") {
  const Grid2D g = make_centered_grid(38.5e-3, 120e-3, 75e-6, 75e-6);
  CHECK(std::abs(g.width() - 38.5e-3) <= 75e-6 / 2);
  CHECK(std::abs(g.depth() - 120e-3) <= 75e-6 / 2);
  CHECK(g.origin_x == doctest::Approx(-g.width() / 2).epsilon(1e-12));
  CHECK(g.origin_z == 0.0);
  CHECK(g.x_max() == doctest::Approx(-g.origin_x).epsilon(1e-12));
}

TEST_CASE("node indexing is z-major with contiguous x scanlines") {
  const Grid2D g = make_grid(0.0, 0.0, 1e-3, 1e-3, 5, 3);
  CHECK(g.idx(0, 0) == 0);
  CHECK(g.idx(4, 0) == 4);
  CHECK(g.idx(0, 1) == 5);
  CHECK(g.idx(2, 2) == 12);
  CHECK(g.size() == 15);
}

TEST_CASE("world/index maps are exact inverses") {
  const Grid2D g = make_grid(-19.25e-3, 0.0, 75e-6, 80e-6, 257, 401);

  SUBCASE("origin maps to index zero") {
    const FracIndex f = world_to_index(g, g.origin_x, g.origin_z);
    CHECK(f.i == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.k == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("linear map of an interior point") {
    const Grid2D unit = make_grid(0.0, 0.0, 1e-3, 1e-3, 8, 8);
    const FracIndex f = world_to_index(unit, 1.5e-3, 2e-3);
    CHECK(f.i == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(f.k == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("round trip at random in-grid points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(g.origin_x, g.x_max());
    std::uniform_real_distribution<double> uz(g.origin_z, g.z_max());
    for (int n = 0; n < 200; ++n) {
      const double x = ux(rng), z = uz(rng);
      const FracIndex f = world_to_index(g, x, z);
      double xb, zb;
      index_to_world(g, f.i, f.k, xb, zb);
      CHECK(xb == doctest::Approx(x).epsilon(1e-12));
      CHECK(zb == doctest::Approx(z).epsilon(1e-12));
    }
  }
}

TEST_CASE("bilinear sampling") {
  const Grid2D g = make_grid(0.0, 0.0, 1e-3, 1e-3, 4, 4);

  SUBCASE("node queries return node values") {
    FieldD f(g);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : f.v) v = u(rng);
    for (int k = 0; k < g.nz; ++k)
      for (int i = 0; i < g.nx; ++i)
        CHECK(sample_bilinear(f, g.x_at(i), g.z_at(k)) ==
              doctest::Approx(f.at(i, k)).epsilon(1e-12));
  }

  SUBCASE("midpoint of two nodes averages them") {
    FieldD f(g, 1.0);
    for (int k = 0; k < g.nz; ++k) f.at(2, k) = 3.0;
    CHECK(sample_bilinear(f, 1.5e-3, 2e-3) == doctest::Approx(2.0));
  }

  SUBCASE("f(i,k) = i + k interpolates to 1.0 at (0.25, 0.75)") {
    const Grid2D unit = make_grid(0.0, 0.0, 1.0, 1.0, 4, 4);
    FieldD f(unit);
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i) f.at(i, k) = i + k;
    CHECK(sample_bilinear(f, 0.25, 0.75) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("affine fields are reproduced exactly anywhere in the grid") {
    FieldD f(g);
    for (int k = 0; k < g.nz; ++k)
      for (int i = 0; i < g.nx; ++i)
        f.at(i, k) = 0.3 + 2.0 * g.x_at(i) - 1.7 * g.z_at(k);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ux(g.origin_x, g.x_max());
    std::uniform_real_distribution<double> uz(g.origin_z, g.z_max());
    for (int n = 0; n < 100; ++n) {
      const double x = ux(rng), z = uz(rng);
      CHECK(sample_bilinear(f, x, z) ==
            doctest::Approx(0.3 + 2.0 * x - 1.7 * z).epsilon(1e-10));
    }
  }

  SUBCASE("out-of-grid queries throw") {
    FieldD f(g, 1.0);
    CHECK_THROWS_AS(sample_bilinear(f, -1e-4, 1e-3), std::out_of_range);
    CHECK_THROWS_AS(sample_bilinear(f, 1e-3, 3.1e-3), std::out_of_range);
  }

  SUBCASE("boundary round-off is tolerated") {
    FieldD f(g, 5.0);
    CHECK(sample_bilinear(f, g.x_max() + 1e-15, g.z_max()) ==
          doctest::Approx(5.0));
  }
}

TEST_CASE("contains matches the closed grid rectangle") {
  const Grid2D g = make_grid(-1e-3, 0.0, 1e-3, 1e-3, 3, 3);
  CHECK(g.contains(0.0, 1e-3));
  CHECK(g.contains(-1e-3, 0.0));
  CHECK(g.contains(1e-3, 2e-3));
  CHECK_FALSE(g.contains(1.1e-3, 1e-3));
  CHECK_FALSE(g.contains(0.0, -1e-4));
}

}  // TEST_SUITE
