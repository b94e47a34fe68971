#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eikr/medium.hpp"

namespace eikr {

struct Scatterer {
  double x = 0.0;
  double z = 0.0;
  float reflectivity = 0.0f;
};

// Circular evaluation region used by the image-quality metrics.
struct EvalRegion {
  std::string label;
  double center_x = 0.0;
  double center_z = 0.0;
  double diameter = 0.0;
};

// Anechoic inclusion painted into the map: an ellipse with semi-axes in
// meters, rotated about its center.
struct CystShape {
  std::string label;
  double center_x = 0.0;
  double center_z = 0.0;
  double semi_x = 0.0;
  double semi_z = 0.0;
  double rotation_deg = 0.0;
};

// Slab of slower tissue under the surface. The top boundary pivots at the
// left grid edge: z_top(x) = top_depth + (x - x_min) * tan(inclination).
struct FatLayerSpec {
  double mean_sos = 1400.0;
  double top_depth = 5e-3;
  double thickness = 10e-3;
  double inclination_deg = 0.0;
};

// Ground truth carried alongside the map: where the point targets really
// are and which circles the metrics integrate over.
struct TargetRegistry {
  std::vector<std::array<double, 2>> point_targets;
  std::vector<EvalRegion> cyst_regions;
  std::vector<EvalRegion> background_regions;
};

struct PhantomSpec {
  double background_sos = 1540.0;
  double perturbation_std = 0.01;  // multiplicative, fraction of local mean
  std::optional<FatLayerSpec> fat_layer;
  std::vector<CystShape> cysts;
  std::vector<std::array<double, 2>> point_targets;
  double point_target_sos = 3000.0;
  double point_target_disk_radius = 0.0;  // 0 skips painting SoS disks
  float point_target_reflectivity = 1.0f;
  bool speckle = true;
  int speckle_stride = 1;  // node subsampling; reflectivity rescaled to match
  std::vector<EvalRegion> cyst_regions;
  std::vector<EvalRegion> background_regions;
};

struct Phantom {
  SosMap sos;
  std::vector<Scatterer> scatterers;
  TargetRegistry registry;
};

enum class ScenarioId { kM1, kM2, kM3, kM4 };

ScenarioId parse_scenario(const std::string& name);
std::string scenario_name(ScenarioId id);

// Assembles map, scatterers and registry from an explicit spec. Deterministic
// for a fixed seed: the perturbation stream is drawn in node order.
Phantom build_phantom(const Grid2D& grid, const PhantomSpec& spec,
                      std::uint64_t seed);

// The four canonical scenarios: shared cyst/target layout, fat layer absent /
// straight / 10 deg / 25 deg. The layout is defined on a 38.5 x 120 mm frame
// and scaled proportionally onto the given grid, so smaller grids carry the
// same scene geometry at reduced size. scenario_spec exposes the assembled
// spec for callers that tweak fields (e.g. speckle density) before building.
PhantomSpec scenario_spec(ScenarioId id, const Grid2D& grid);
Phantom build_scenario(ScenarioId id, const Grid2D& grid, std::uint64_t seed);

// Boolean mask per pixel: true iff the pixel center lies within the circle.
// A circle reaching outside the grid is an error.
std::vector<std::uint8_t> rasterize_region(const Grid2D& pixel_grid,
                                           const EvalRegion& region);

// On-disk bundle: sos.eikr raster, registry.json, scatterers.f32 (x, z,
// reflectivity triples as float32).
struct PhantomBundle {
  Phantom phantom;
  std::string scenario;
  std::uint64_t seed = 0;
};

void write_phantom_bundle(const std::string& dir, const Phantom& phantom,
                          const std::string& scenario, std::uint64_t seed);
PhantomBundle read_phantom_bundle(const std::string& dir);

// Reads just the registry part of a bundle (a registry.json file).
TargetRegistry read_registry(const std::string& path);

}  // namespace eikr
