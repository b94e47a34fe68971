#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eikr/grid.hpp"
#include "eikr/metrics.hpp"

namespace {

constexpr double kLambda = 0.5e-3;

// 201 x 201 image at 50 um: ten wavelengths on a side
eikr::Grid2D image_grid() { return eikr::make_grid(-5e-3, 0.0, 5e-5, 5e-5, 201, 201); }

// gaussian spot whose -6 dB full width is `width`
void add_blob(eikr::FieldD& env, double cx, double cz, double width,
              double amplitude = 1.0) {
  const double s = 0.5 * width / std::sqrt(2.0 * 0.3 * std::log(10.0));
  const eikr::Grid2D& g = env.grid;
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i) {
      const double dx = g.x_at(i) - cx;
      const double dz = g.z_at(k) - cz;
      env.v[g.idx(i, k)] +=
          amplitude * std::exp(-0.5 * (dx * dx + dz * dz) / (s * s));
    }
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("a tight on-target spot scores one") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 0.0, 5e-3, 0.8 * kLambda);

  const auto rep = eikr::gds(env, {{0.0, 5e-3}}, kLambda);
  REQUIRE(rep.targets.size() == 1);
  const auto& t = rep.targets[0];
  CHECK(t.found);
  CHECK(t.score == 1);
  CHECK(rep.mean == 1.0);
  // symmetric spot centered on a node: refinement must not move the peak
  CHECK(std::abs(t.peak[0]) <= 1e-9);
  CHECK(std::abs(t.peak[1] - 5e-3) <= 1e-9);
  // -6 dB endpoints a half-width out on either side
  CHECK(std::abs(t.left_x + 0.4 * kLambda) <= 2e-6);
  CHECK(std::abs(t.right_x - 0.4 * kLambda) <= 2e-6);
}

TEST_CASE("a spot displaced beyond one wavelength scores zero") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 1.5 * kLambda, 5e-3, 0.8 * kLambda);

  const auto rep = eikr::gds(env, {{0.0, 5e-3}}, kLambda);
  const auto& t = rep.targets[0];
  CHECK(t.found);  // still visible inside the search window
  CHECK(std::abs(t.peak[0] - 1.5 * kLambda) <= 5e-6);
  CHECK(t.score == 0);
  CHECK(rep.mean == 0.0);
}

TEST_CASE("half-wavelength displacement still counts as resolved") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 0.0, 5e-3 + 0.5 * kLambda, 0.8 * kLambda);

  const auto rep = eikr::gds(env, {{0.0, 5e-3}}, kLambda);
  CHECK(rep.targets[0].score == 1);
}

TEST_CASE("a bloated spot fails on its -6 dB width") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 0.0, 5e-3, 2.6 * kLambda);  // endpoints 1.3 wavelengths out

  const auto rep = eikr::gds(env, {{0.0, 5e-3}}, kLambda);
  CHECK(rep.targets[0].found);
  CHECK(rep.targets[0].score == 0);
}

TEST_CASE("targets below the image floor are counted as lost") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 2e-3, 2e-3, 0.8 * kLambda, 1.0);       // dominant echo
  add_blob(env, -2e-3, 7e-3, 0.8 * kLambda, 5e-4);     // under -60 dB

  const auto rep = eikr::gds(env, {{-2e-3, 7e-3}, {2e-3, 2e-3}}, kLambda);
  CHECK_FALSE(rep.targets[0].found);
  CHECK(rep.targets[0].score == 0);
  CHECK(rep.targets[1].score == 1);
  CHECK(rep.mean == 0.5);

  // an entirely dark image finds nothing
  eikr::FieldD dark(g);
  const auto none = eikr::gds(dark, {{0.0, 5e-3}}, kLambda);
  CHECK_FALSE(none.targets[0].found);
  CHECK(none.mean == 0.0);
}

TEST_CASE("the score ignores global amplitude scaling") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 0.0, 3e-3, 0.8 * kLambda);
  add_blob(env, 1e-3, 7e-3, 2.6 * kLambda);

  const std::vector<std::array<double, 2>> targets{{0.0, 3e-3}, {1e-3, 7e-3}};
  const auto base = eikr::gds(env, targets, kLambda);

  eikr::FieldD scaled(g);
  for (std::size_t n = 0; n < env.v.size(); ++n) scaled.v[n] = 3.7 * env.v[n];
  const auto big = eikr::gds(scaled, targets, kLambda);

  REQUIRE(base.targets.size() == big.targets.size());
  for (std::size_t n = 0; n < base.targets.size(); ++n)
    CHECK(base.targets[n].score == big.targets[n].score);
  CHECK(base.mean == big.mean);
}

TEST_CASE("the mean averages hits over all targets") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  std::vector<std::array<double, 2>> targets;
  int n = 0;
  // columns 2.2 mm apart so a spot displaced 0.8 mm stays out of the
  // neighboring target's 2.5-wavelength search window
  for (double z : {3e-3, 7e-3})
    for (double x : {-4.4e-3, -2.2e-3, 0.0, 2.2e-3, 4.4e-3}) {
      // three of the ten spots render far enough off to miss
      const double off = (n == 1 || n == 6 || n == 8) ? 1.6 * kLambda : 0.0;
      add_blob(env, x + off, z, 0.8 * kLambda);
      targets.push_back({x, z});
      ++n;
    }

  const auto rep = eikr::gds(env, targets, kLambda);
  REQUIRE(rep.targets.size() == 10);
  CHECK(rep.mean == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("distortion score rejects bad parameters") {
  const auto g = image_grid();
  eikr::FieldD env(g);
  add_blob(env, 0.0, 5e-3, 0.8 * kLambda);

  CHECK_THROWS_AS((void)eikr::gds(env, {{0.0, 5e-3}}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)eikr::gds(env, {{0.0, 5e-3}}, kLambda, 0.4 * kLambda),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)eikr::gds(env, {{0.0, 20e-3}}, kLambda),
                  std::invalid_argument);
}

TEST_CASE("identical amplitude populations give zero contrast") {
  const auto g = eikr::make_grid(0.0, 0.0, 1e-4, 1e-4, 200, 200);
  eikr::FieldD env(g);
  std::vector<std::uint8_t> a(g.size(), 0), b(g.size(), 0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t m = 0; m < 10000; ++m) {
    const double v = uni(rng);
    env.v[2 * m] = v;      // the same multiset lands in both regions
    env.v[2 * m + 1] = v;
    a[2 * m] = 1;
    b[2 * m + 1] = 1;
  }

  const auto rep = eikr::gcnr(env, a, b);
  // the overlap sum is 1 only up to accumulation round-off
  CHECK(rep.gcnr <= 1e-9);
  CHECK(rep.n_cyst == 10000);
  CHECK(rep.n_background == 10000);
  CHECK(rep.n_bins == 100);
}

TEST_CASE("disjoint amplitude ranges give full contrast") {
  const auto g = eikr::make_grid(0.0, 0.0, 1e-4, 1e-4, 200, 200);
  eikr::FieldD env(g);
  std::vector<std::uint8_t> a(g.size(), 0), b(g.size(), 0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lo(0.0, 0.4), hi(0.6, 1.0);
  for (std::size_t m = 0; m < 8000; ++m) {
    env.v[2 * m] = lo(rng);
    env.v[2 * m + 1] = hi(rng);
    a[2 * m] = 1;
    b[2 * m + 1] = 1;
  }

  CHECK(eikr::gcnr(env, a, b).gcnr == 1.0);
}

TEST_CASE("half-overlapping uniforms land near one half") {
  const auto g = eikr::make_grid(0.0, 0.0, 1e-4, 1e-4, 250, 250);
  eikr::FieldD env(g);
  std::vector<std::uint8_t> a(g.size(), 0), b(g.size(), 0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.0, 1.0), ub(0.5, 1.5);
  for (std::size_t m = 0; m < 20000; ++m) {
    env.v[2 * m] = ua(rng);
    env.v[2 * m + 1] = ub(rng);
    a[2 * m] = 1;
    b[2 * m + 1] = 1;
  }

  CHECK(std::abs(eikr::gcnr(env, a, b).gcnr - 0.5) <= 0.05);
}

TEST_CASE("contrast is invariant under monotone amplitude maps") {
  const auto g = eikr::make_grid(0.0, 0.0, 1e-4, 1e-4, 250, 250);
  eikr::FieldD env(g);
  std::vector<std::uint8_t> a(g.size(), 0), b(g.size(), 0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> na(1.0, 0.25), nb(1.8, 0.35);
  for (std::size_t m = 0; m < 15000; ++m) {
    env.v[2 * m] = std::abs(na(rng));
    env.v[2 * m + 1] = std::abs(nb(rng));
    a[2 * m] = 1;
    b[2 * m + 1] = 1;
  }
  const double base = eikr::gcnr(env, a, b).gcnr;

  std::uniform_real_distribution<double> gain(0.5, 3.0), offset(0.0, 2.0);
  const std::array<double, 4> powers{0.5, 1.0, 2.0, 3.0};
  for (int trial = 0; trial < 8; ++trial) {
    const double ga = gain(rng), of = offset(rng);
    const double p = powers[static_cast<std::size_t>(trial) % powers.size()];
    eikr::FieldD mapped(g);
    for (std::size_t n = 0; n < env.v.size(); ++n)
      mapped.v[n] = ga * std::pow(env.v[n], p) + of;
    const double remapped = eikr::gcnr(mapped, a, b).gcnr;
    CHECK(std::abs(remapped - base) <= 0.02);
  }
}

TEST_CASE("contrast metric rejects malformed regions") {
  const auto g = eikr::make_grid(0.0, 0.0, 1e-4, 1e-4, 10, 10);
  eikr::FieldD env(g);
  std::vector<std::uint8_t> a(g.size(), 0), b(g.size(), 0);
  a[3] = 1;
  b[7] = 1;

  auto both = a;
  both[7] = 1;  // overlaps b
  CHECK_THROWS_AS((void)eikr::gcnr(env, both, b), std::invalid_argument);

  const std::vector<std::uint8_t> empty(g.size(), 0);
  CHECK_THROWS_AS((void)eikr::gcnr(env, a, empty), std::invalid_argument);

  std::vector<std::uint8_t> short_mask(g.size() - 1, 0);
  CHECK_THROWS_AS((void)eikr::gcnr(env, short_mask, b), std::invalid_argument);

  CHECK_THROWS_AS((void)eikr::gcnr(env, a, b, 1), std::invalid_argument);

  // two all-zero regions overlap completely
  CHECK(eikr::gcnr(env, a, b).gcnr == 0.0);
}

TEST_CASE("comparison table lists one row per method and scenario") {
  std::vector<eikr::MethodResult> results;
  results.push_back({"das", "M1", 1.0, {{"CY1", 0.81}, {"CY2", 0.75}}});
  results.push_back({"das", "M4", 0.4, {{"CY1", 0.62}, {"CY2", 0.55}}});
  results.push_back({"fm-das", "M1", 1.0, {{"CY1", 0.82}, {"CY2", 0.76}}});
  results.push_back({"fm-das", "M4", 0.9, {{"CY1", 0.79}, {"CY2", 0.72}}});

  const auto lines = split_lines(eikr::compare_report(results));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "method,scenario,mean_gds,gcnr_CY1,gcnr_CY2");
  CHECK(lines[1] == "das,M1,1,0.81,0.75");
  CHECK(lines[2] == "das,M4,0.4,0.62,0.55");
  CHECK(lines[3] == "fm-das,M1,1,0.82,0.76");
  CHECK(lines[4] == "fm-das,M4,0.9,0.79,0.72");
}

TEST_CASE("comparison table rejects inconsistent result sets") {
  CHECK_THROWS_AS((void)eikr::compare_report({}), std::invalid_argument);

  std::vector<eikr::MethodResult> dup;
  dup.push_back({"das", "M1", 1.0, {{"CY1", 0.8}}});
  dup.push_back({"das", "M1", 0.9, {{"CY1", 0.7}}});
  CHECK_THROWS_AS((void)eikr::compare_report(dup), std::invalid_argument);

  std::vector<eikr::MethodResult> uneven;
  uneven.push_back({"das", "M1", 1.0, {{"CY1", 0.8}}});
  uneven.push_back({"das", "M2", 1.0, {{"CY1", 0.8}}});
  uneven.push_back({"fm-das", "M1", 1.0, {{"CY1", 0.8}}});
  CHECK_THROWS_AS((void)eikr::compare_report(uneven), std::invalid_argument);

  std::vector<eikr::MethodResult> labels;
  labels.push_back({"das", "M1", 1.0, {{"CY1", 0.8}}});
  labels.push_back({"fm-das", "M1", 1.0, {{"CY9", 0.8}}});
  CHECK_THROWS_AS((void)eikr::compare_report(labels), std::invalid_argument);
}

}  // TEST_SUITE
