#include "eikr/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "eikr/raster_io.hpp"

namespace eikr {

namespace {

constexpr double kFrameWidth = 38.5e-3;   // reference frame for scenarios
constexpr double kFrameDepth = 120e-3;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

bool inside_cyst(const CystShape& c, double x, double z) {
  const double a = deg2rad(c.rotation_deg);
  const double u = (x - c.center_x) * std::cos(a) + (z - c.center_z) * std::sin(a);
  const double v = -(x - c.center_x) * std::sin(a) + (z - c.center_z) * std::cos(a);
  const double nu = u / c.semi_x;
  const double nv = v / c.semi_z;
  return nu * nu + nv * nv <= 1.0;
}

void validate_layer(const FatLayerSpec& layer, const Grid2D& g) {
  if (layer.mean_sos <= 0.0 || layer.thickness <= 0.0)
    throw std::invalid_argument("fat layer needs positive sos and thickness");
  if (layer.inclination_deg < 0.0 || layer.inclination_deg > 45.0)
    throw std::invalid_argument("fat layer inclination outside [0, 45] degrees");
  if (layer.top_depth < 0.0)
    throw std::invalid_argument("fat layer top above the surface");
  const double deepest = layer.top_depth +
                         g.width() * std::tan(deg2rad(layer.inclination_deg)) +
                         layer.thickness;
  if (deepest > g.depth())
    throw std::invalid_argument("fat layer extends below the grid");
}

bool inside_layer(const FatLayerSpec& layer, const Grid2D& g, double x,
                  double z) {
  const double top = layer.top_depth +
                     (x - g.origin_x) * std::tan(deg2rad(layer.inclination_deg));
  return z >= top && z < top + layer.thickness;
}

}  // namespace

ScenarioId parse_scenario(const std::string& name) {
  if (name == "M1") return ScenarioId::kM1;
  if (name == "M2") return ScenarioId::kM2;
  if (name == "M3") return ScenarioId::kM3;
  if (name == "M4") return ScenarioId::kM4;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::kM1: return "M1";
    case ScenarioId::kM2: return "M2";
    case ScenarioId::kM3: return "M3";
    case ScenarioId::kM4: return "M4";
  }
  throw std::invalid_argument("unknown scenario id");
}

Phantom build_phantom(const Grid2D& grid, const PhantomSpec& spec,
                      std::uint64_t seed) {
  if (spec.background_sos <= 0.0)
    throw std::invalid_argument("background sos must be positive");
  if (spec.perturbation_std < 0.0 || spec.perturbation_std >= 0.5)
    throw std::invalid_argument("perturbation std outside [0, 0.5)");
  if (spec.speckle_stride < 1)
    throw std::invalid_argument("speckle stride must be at least 1");
  if (spec.fat_layer) validate_layer(*spec.fat_layer, grid);
  for (const auto& t : spec.point_targets)
    if (!grid.contains(t[0], t[1]))
      throw std::invalid_argument("point target outside grid");

  // one draw per node in raster order keeps the phantom reproducible
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<float> frac(grid.size());
  for (std::size_t n = 0; n < frac.size(); ++n)
    frac[n] = static_cast<float>(gauss(rng) * spec.perturbation_std);

  FieldF c(grid);
  std::vector<std::uint8_t> in_cyst(grid.size(), 0);
  for (int k = 0; k < grid.nz; ++k) {
    const double z = grid.z_at(k);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x_at(i);
      const std::size_t n = grid.idx(i, k);
      double base = spec.background_sos;
      if (spec.fat_layer && inside_layer(*spec.fat_layer, grid, x, z))
        base = spec.fat_layer->mean_sos;
      double v = base * (1.0 + frac[n]);
      for (const CystShape& cy : spec.cysts) {
        if (inside_cyst(cy, x, z)) {
          v = spec.background_sos;  // anechoic: homogeneous and echo-free
          in_cyst[n] = 1;
          break;
        }
      }
      c.v[n] = static_cast<float>(v);
    }
  }

  if (spec.point_target_disk_radius > 0.0) {
    const double r = spec.point_target_disk_radius;
    for (const auto& t : spec.point_targets) {
      const int i_lo = std::max(0, static_cast<int>(std::floor((t[0] - r - grid.origin_x) / grid.dx)));
      const int i_hi = std::min(grid.nx - 1, static_cast<int>(std::ceil((t[0] + r - grid.origin_x) / grid.dx)));
      const int k_lo = std::max(0, static_cast<int>(std::floor((t[1] - r - grid.origin_z) / grid.dz)));
      const int k_hi = std::min(grid.nz - 1, static_cast<int>(std::ceil((t[1] + r - grid.origin_z) / grid.dz)));
      for (int k = k_lo; k <= k_hi; ++k)
        for (int i = i_lo; i <= i_hi; ++i) {
          const double dxr = grid.x_at(i) - t[0];
          const double dzr = grid.z_at(k) - t[1];
          if (dxr * dxr + dzr * dzr <= r * r)
            c.v[grid.idx(i, k)] = static_cast<float>(spec.point_target_sos);
        }
    }
  }

  Phantom ph{make_sos_map(std::move(c)), {}, {}};

  if (spec.speckle) {
    const int s = spec.speckle_stride;
    ph.scatterers.reserve(grid.size() / (static_cast<std::size_t>(s) * s));
    for (int k = 0; k < grid.nz; k += s) {
      for (int i = 0; i < grid.nx; i += s) {
        const std::size_t n = grid.idx(i, k);
        if (in_cyst[n]) continue;
        // subsampling thins the per-cell scatterer count by stride^2, so the
        // amplitude scales by stride to keep the coherent sum comparable
        const float refl = frac[n] * static_cast<float>(s);
        ph.scatterers.push_back({grid.x_at(i), grid.z_at(k), refl});
      }
    }
  }
  for (const auto& t : spec.point_targets)
    ph.scatterers.push_back({t[0], t[1], spec.point_target_reflectivity});

  ph.registry.point_targets = spec.point_targets;
  ph.registry.cyst_regions = spec.cyst_regions;
  ph.registry.background_regions = spec.background_regions;
  return ph;
}

PhantomSpec scenario_spec(ScenarioId id, const Grid2D& grid) {
  const double sx = grid.width() / kFrameWidth;
  const double sz = grid.depth() / kFrameDepth;
  const double sd = std::min(sx, sz);  // isotropic for shapes and diameters
  const double x_mid = grid.origin_x + 0.5 * grid.width();
  auto X = [&](double frame_x) { return x_mid + frame_x * sx; };
  auto Z = [&](double frame_z) { return grid.origin_z + frame_z * sz; };

  PhantomSpec spec;
  spec.cysts = {
      {"CY1", X(-13e-3), Z(53e-3), 6e-3 * sd, 6e-3 * sd, 0.0},
      {"CY2", X(4e-3), Z(26e-3), 5e-3 * sd, 3e-3 * sd, 0.0},
      {"CY3", X(13e-3), Z(42e-3), 4e-3 * sd, 6e-3 * sd, 30.0},
  };
  spec.cyst_regions = {
      {"CY1", X(-13e-3), Z(53e-3), 10e-3 * sd},
      {"CY2", X(4e-3), Z(26e-3), 5e-3 * sd},
      {"CY3", X(13e-3), Z(42e-3), 6e-3 * sd},
  };
  spec.background_regions = {
      {"BG1", X(-13e-3), Z(30e-3), 10e-3 * sd},
      {"BG2", X(4e-3), Z(14e-3), 5e-3 * sd},
      {"BG3", X(13e-3), Z(30e-3), 6e-3 * sd},
  };

  for (int n = 0; n < 6; ++n)  // axial column, 1.5 cm spacing
    spec.point_targets.push_back({X(0.0), Z((15e-3) * (n + 1))});
  for (double fx : {-15e-3, -5e-3, 5e-3, 15e-3})
    spec.point_targets.push_back({X(fx), Z(53e-3)});
  spec.point_target_disk_radius = 0.3e-3 * sd;

  switch (id) {
    case ScenarioId::kM1: break;
    case ScenarioId::kM2:
      spec.fat_layer = FatLayerSpec{1400.0, 5e-3 * sz, 10e-3 * sz, 0.0};
      break;
    case ScenarioId::kM3:
      spec.fat_layer = FatLayerSpec{1400.0, 5e-3 * sz, 10e-3 * sz, 10.0};
      break;
    case ScenarioId::kM4:
      spec.fat_layer = FatLayerSpec{1400.0, 5e-3 * sz, 10e-3 * sz, 25.0};
      break;
  }
  return spec;
}

Phantom build_scenario(ScenarioId id, const Grid2D& grid, std::uint64_t seed) {
  return build_phantom(grid, scenario_spec(id, grid), seed);
}

std::vector<std::uint8_t> rasterize_region(const Grid2D& pixel_grid,
                                           const EvalRegion& region) {
  const double r = 0.5 * region.diameter;
  if (r <= 0.0) throw std::invalid_argument("region diameter must be positive");
  if (!pixel_grid.contains(region.center_x - r, region.center_z - r) ||
      !pixel_grid.contains(region.center_x + r, region.center_z + r))
    throw std::invalid_argument("evaluation region exceeds the pixel grid");

  std::vector<std::uint8_t> mask(pixel_grid.size(), 0);
  for (int k = 0; k < pixel_grid.nz; ++k) {
    const double dz = pixel_grid.z_at(k) - region.center_z;
    for (int i = 0; i < pixel_grid.nx; ++i) {
      const double dx = pixel_grid.x_at(i) - region.center_x;
      if (dx * dx + dz * dz <= r * r) mask[pixel_grid.idx(i, k)] = 1;
    }
  }
  return mask;
}

void write_phantom_bundle(const std::string& dir, const Phantom& phantom,
                          const std::string& scenario, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_raster((fs::path(dir) / "sos.eikr").string(), phantom.sos.c);

  std::ofstream scat(fs::path(dir) / "scatterers.f32", std::ios::binary);
  if (!scat) throw std::runtime_error("cannot write scatterers in " + dir);
  for (const Scatterer& s : phantom.scatterers) {
    const float triple[3] = {static_cast<float>(s.x), static_cast<float>(s.z),
                             s.reflectivity};
    scat.write(reinterpret_cast<const char*>(triple), sizeof triple);
  }

  nlohmann::json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["point_targets"] = nlohmann::json::array();
  for (const auto& t : phantom.registry.point_targets)
    j["point_targets"].push_back({t[0], t[1]});
  auto regions = [](const std::vector<EvalRegion>& rs) {
    nlohmann::json a = nlohmann::json::array();
    for (const EvalRegion& r : rs)
      a.push_back({{"label", r.label},
                   {"center_x", r.center_x},
                   {"center_z", r.center_z},
                   {"diameter", r.diameter}});
    return a;
  };
  j["cyst_regions"] = regions(phantom.registry.cyst_regions);
  j["background_regions"] = regions(phantom.registry.background_regions);

  std::ofstream reg(fs::path(dir) / "registry.json");
  if (!reg) throw std::runtime_error("cannot write registry in " + dir);
  reg << j.dump(2) << "\n";
}

TargetRegistry read_registry(const std::string& path) {
  std::ifstream reg(path);
  if (!reg) throw std::runtime_error("cannot read registry " + path);
  nlohmann::json j = nlohmann::json::parse(reg);

  TargetRegistry out;
  for (const auto& t : j.at("point_targets"))
    out.point_targets.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
  auto regions = [](const nlohmann::json& a) {
    std::vector<EvalRegion> rs;
    for (const auto& r : a)
      rs.push_back({r.at("label").get<std::string>(),
                    r.at("center_x").get<double>(),
                    r.at("center_z").get<double>(),
                    r.at("diameter").get<double>()});
    return rs;
  };
  out.cyst_regions = regions(j.at("cyst_regions"));
  out.background_regions = regions(j.at("background_regions"));
  return out;
}

PhantomBundle read_phantom_bundle(const std::string& dir) {
  namespace fs = std::filesystem;

  PhantomBundle b;
  FieldF c = read_raster((fs::path(dir) / "sos.eikr").string());
  b.phantom.sos = make_sos_map(std::move(c));

  std::ifstream scat(fs::path(dir) / "scatterers.f32", std::ios::binary);
  if (!scat) throw std::runtime_error("cannot read scatterers in " + dir);
  float triple[3];
  while (scat.read(reinterpret_cast<char*>(triple), sizeof triple))
    b.phantom.scatterers.push_back({triple[0], triple[1], triple[2]});

  const std::string reg_path = (fs::path(dir) / "registry.json").string();
  b.phantom.registry = read_registry(reg_path);
  std::ifstream reg(reg_path);
  nlohmann::json j = nlohmann::json::parse(reg);
  b.scenario = j.at("scenario").get<std::string>();
  b.seed = j.at("seed").get<std::uint64_t>();
  return b;
}

}  // namespace eikr
