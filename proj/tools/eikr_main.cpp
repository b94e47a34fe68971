#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "eikr/pipeline.hpp"
#include "eikr/raster_io.hpp"
#include "eikr/rf_io.hpp"
#include "eikr/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace eikr;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false;
  bool threads_set = false;

  PipelineConfig load() const {
    PipelineConfig cfg =
        config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (threads_set) cfg.threads = threads;
    return cfg;
  }
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "override the config seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "override worker thread count")
      ->check(CLI::Range(1, 256))
      ->each([&](const std::string&) { opts.threads_set = true; });
}

void cmd_phantom(const CommonOpts& common, const std::string& scenario,
                 const std::string& out) {
  const PipelineConfig cfg = common.load();
  const Grid2D grid = cfg.make_grid();
  PhantomSpec spec = scenario_spec(parse_scenario(scenario), grid);
  spec.speckle = cfg.speckle;
  spec.speckle_stride = cfg.speckle_stride;
  const Phantom ph = build_phantom(grid, spec, cfg.seed);
  write_phantom_bundle(out, ph, scenario, cfg.seed);
  std::cerr << "phantom " << scenario << " (" << ph.scatterers.size()
            << " scatterers) -> " << out << "\n";
}

void cmd_rfsim(const CommonOpts& common, const std::string& phantom_dir,
               const std::string& out) {
  const PipelineConfig cfg = common.load();
  const PhantomBundle bundle = read_phantom_bundle(phantom_dir);
  const TransducerArray array = cfg.make_array();
  const RfDataSet rf =
      simulate_rf(bundle.phantom, array, cfg.make_events(array),
                  cfg.make_pulse(), cfg.make_sim_config());
  write_rf(out, rf);
  std::cerr << "rf " << rf.transmit_count() << "x" << rf.element_count() << "x"
            << rf.n_samples << " @ " << rf.fs / 1e6 << " MHz -> " << out << "\n";
}

void cmd_solve_times(const std::string& sos_path, double sx, double sz,
                     double disk_radius, const std::string& out) {
  SosMap map = make_sos_map(read_raster(sos_path));
  FmConfig fc;
  fc.source_disk_radius = disk_radius;
  const TravelTimeField field = solve_eikonal(map, sx, sz, fc);
  write_raster(out, field.t);
  std::cerr << "travel times from (" << sx << ", " << sz << ") -> " << out
            << "\n";
}

void cmd_beamform(const CommonOpts& common, const std::string& rf_path,
                  const std::string& method, const std::string& sos_path,
                  const std::string& out) {
  const PipelineConfig cfg = common.load();
  const RfDataSet rf = read_rf(rf_path);

  std::unique_ptr<DelayProvider> provider;
  if (method == "fm-das") {
    if (sos_path.empty())
      throw std::invalid_argument("method fm-das requires --sos");
    const SosMap truth = make_sos_map(read_raster(sos_path));
    const SosMap smoothed =
        preprocess_sos(truth, cfg.median_radius, cfg.smooth_sigma);
    provider = std::make_unique<FmDelayProvider>(smoothed, rf.array, rf.events,
                                                 FmConfig{}, cfg.threads);
  } else {
    provider = std::make_unique<GeometricDelayProvider>(rf.array, rf.events,
                                                        rf.array.c_ref);
  }

  const BeamformedImage img =
      beamform_image(rf, *provider, cfg.apodization, cfg.make_pixel_grid(),
                     cfg.dynamic_range_db, cfg.threads);
  fs::create_directories(out);
  write_raster((fs::path(out) / "rf_sum.eikr").string(), img.rf_sum);
  write_raster((fs::path(out) / "envelope.eikr").string(), img.envelope);
  write_raster((fs::path(out) / "log_db.eikr").string(), img.log_db);
  write_pgm((fs::path(out) / "image.pgm").string(), img.log_db,
            -cfg.dynamic_range_db);
  std::cerr << method << " image " << img.pixel_grid.nx << "x"
            << img.pixel_grid.nz << " -> " << out << "\n";
}

void cmd_metrics(const CommonOpts& common, const std::string& envelope_path,
                 const std::string& registry_path, const std::string& method,
                 const std::string& scenario, const std::string& out) {
  const PipelineConfig cfg = common.load();
  const FieldF envf = read_raster(envelope_path);
  FieldD env(envf.grid);
  for (std::size_t n = 0; n < envf.v.size(); ++n) env.v[n] = envf.v[n];

  const TargetRegistry reg = read_registry(registry_path);
  MethodResult res;
  res.method = method;
  res.scenario = scenario;
  res.mean_gds = gds(env, reg.point_targets, cfg.c_ref / cfg.f0).mean;
  for (std::size_t i = 0;
       i < reg.cyst_regions.size() && i < reg.background_regions.size(); ++i) {
    const auto cy = rasterize_region(env.grid, reg.cyst_regions[i]);
    const auto bg = rasterize_region(env.grid, reg.background_regions[i]);
    res.gcnr_per_cyst.emplace_back(reg.cyst_regions[i].label,
                                   gcnr(env, cy, bg).gcnr);
  }

  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << compare_report({res});
  std::cerr << "metrics " << method << "/" << scenario << " -> " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"focused-transmit ultrasound reconstruction with eikonal "
               "refraction-corrected delays"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOpts common;

  auto* ph = app.add_subcommand("phantom", "build a scenario phantom bundle");
  std::string ph_scenario, ph_out;
  attach_common(ph, common);
  ph->add_option("--scenario", ph_scenario, "M1, M2, M3 or M4")->required();
  ph->add_option("--out", ph_out, "output bundle directory")->required();

  auto* rs = app.add_subcommand("rfsim", "synthesize rf channel data");
  std::string rs_phantom, rs_out;
  attach_common(rs, common);
  rs->add_option("--phantom", rs_phantom, "phantom bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  rs->add_option("--out", rs_out, "output rf file")->required();

  auto* st = app.add_subcommand("solve-times",
                                "dump one eikonal travel-time field");
  std::string st_sos, st_out;
  double st_x = 0.0, st_z = 0.0, st_disk = 0.0;
  st->add_option("--sos", st_sos, "speed-of-sound raster")
      ->required()
      ->check(CLI::ExistingFile);
  st->add_option("--source-x", st_x, "source x in meters");
  st->add_option("--source-z", st_z, "source z in meters");
  st->add_option("--disk-radius", st_disk,
                 "analytic source disk radius in meters (0 = default)");
  st->add_option("--out", st_out, "output travel-time raster")->required();

  auto* bf = app.add_subcommand("beamform", "reconstruct an image from rf");
  std::string bf_rf, bf_method, bf_sos, bf_out;
  attach_common(bf, common);
  bf->add_option("--rf", bf_rf, "rf data file")->required()->check(CLI::ExistingFile);
  bf->add_option("--method", bf_method, "das or fm-das")
      ->required()
      ->check(CLI::IsMember({"das", "fm-das"}));
  bf->add_option("--sos", bf_sos, "speed-of-sound raster (fm-das)")
      ->check(CLI::ExistingFile);
  bf->add_option("--out", bf_out, "output image directory")->required();

  auto* mt = app.add_subcommand("metrics", "score an image against a registry");
  std::string mt_env, mt_reg, mt_method = "das", mt_scenario = "M1", mt_out;
  attach_common(mt, common);
  mt->add_option("--envelope", mt_env, "envelope raster")
      ->required()
      ->check(CLI::ExistingFile);
  mt->add_option("--registry", mt_reg, "registry json")
      ->required()
      ->check(CLI::ExistingFile);
  mt->add_option("--method", mt_method, "method label for the report");
  mt->add_option("--scenario", mt_scenario, "scenario label for the report");
  mt->add_option("--out", mt_out, "output csv")->required();

  auto* pl = app.add_subcommand("pipeline", "full run: phantom to report");
  std::string pl_out;
  attach_common(pl, common);
  pl->add_option("--out", pl_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ph) cmd_phantom(common, ph_scenario, ph_out);
    if (*rs) cmd_rfsim(common, rs_phantom, rs_out);
    if (*st) cmd_solve_times(st_sos, st_x, st_z, st_disk, st_out);
    if (*bf) cmd_beamform(common, bf_rf, bf_method, bf_sos, bf_out);
    if (*mt) cmd_metrics(common, mt_env, mt_reg, mt_method, mt_scenario, mt_out);
    if (*pl) run_pipeline(common.load(), pl_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
