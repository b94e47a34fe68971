#include "eikr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "eikr/raster_io.hpp"
#include "eikr/rf_io.hpp"
#include "eikr/version.hpp"

namespace eikr {

namespace fs = std::filesystem;
using nlohmann::json;

Grid2D PipelineConfig::make_grid() const {
  return make_centered_grid(grid_width, grid_depth, grid_dx, grid_dz);
}

Grid2D PipelineConfig::make_pixel_grid() const {
  // floor instead of round so pixels never extend past the map extent
  const int nx = static_cast<int>(std::floor(grid_width / pixel_dx + 1e-9)) + 1;
  const int nz = static_cast<int>(std::floor(grid_depth / pixel_dz + 1e-9)) + 1;
  return eikr::make_grid(-0.5 * (nx - 1) * pixel_dx, 0.0, pixel_dx, pixel_dz,
                         nx, nz);
}

TransducerArray PipelineConfig::make_array() const {
  return eikr::make_array(n_elements, pitch, f0, c_ref);
}

std::vector<TransmitEvent> PipelineConfig::make_events(
    const TransducerArray& array) const {
  return make_transmit_events(array, n_transmits, focal_depth, tx_f_number);
}

PulseSpec PipelineConfig::make_pulse() const {
  return PulseSpec{f0, fractional_bandwidth};
}

SimConfig PipelineConfig::make_sim_config() const {
  SimConfig sim;
  sim.fs = fs;
  sim.truth_delay_model = parse_truth_delay_model(truth_delay_model);
  sim.noise_std = noise_std;
  sim.noise_seed = seed + 1000003;  // decoupled from the phantom stream
  sim.threads = threads;
  return sim;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::invalid_argument("unknown config key '" + key + "' in " + where);
  }
}

void fail(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

}  // namespace

PipelineConfig parse_config(const json& j) {
  PipelineConfig cfg;
  check_keys(j,
             {"version", "scenario", "scenarios", "seed", "grid", "array",
              "transmit", "pulse", "apodization", "preprocess", "pixel_grid",
              "sim", "methods", "dynamic_range_db", "threads"},
             "top level");

  if (j.contains("version") && j["version"].get<int>() != 1)
    fail("unsupported config version");
  if (j.contains("scenario") && j.contains("scenarios"))
    fail("give either 'scenario' or 'scenarios', not both");
  if (j.contains("scenario"))
    cfg.scenarios = {j["scenario"].get<std::string>()};
  if (j.contains("scenarios"))
    cfg.scenarios = j["scenarios"].get<std::vector<std::string>>();
  if (cfg.scenarios.empty()) fail("empty scenario list");
  for (const std::string& s : cfg.scenarios) parse_scenario(s);
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"width", "depth", "dx", "dz"}, "grid");
    if (g.contains("width")) cfg.grid_width = g["width"].get<double>();
    if (g.contains("depth")) cfg.grid_depth = g["depth"].get<double>();
    if (g.contains("dx")) cfg.grid_dx = g["dx"].get<double>();
    if (g.contains("dz")) cfg.grid_dz = g["dz"].get<double>();
  }
  if (cfg.grid_width <= 0 || cfg.grid_depth <= 0) fail("grid extent must be positive");
  if (cfg.grid_dx <= 0 || cfg.grid_dx > cfg.grid_width ||
      cfg.grid_dz <= 0 || cfg.grid_dz > cfg.grid_depth)
    fail("grid spacing outside (0, extent]");

  if (j.contains("array")) {
    const json& a = j["array"];
    check_keys(a, {"n_elements", "pitch", "f0", "c_ref"}, "array");
    if (a.contains("n_elements")) cfg.n_elements = a["n_elements"].get<int>();
    if (a.contains("pitch")) cfg.pitch = a["pitch"].get<double>();
    if (a.contains("f0")) cfg.f0 = a["f0"].get<double>();
    if (a.contains("c_ref")) cfg.c_ref = a["c_ref"].get<double>();
  }
  if (cfg.n_elements < 2) fail("need at least 2 elements");
  if (cfg.pitch <= 0 || cfg.f0 <= 0) fail("pitch and f0 must be positive");
  if (cfg.c_ref < 500 || cfg.c_ref > 5000) fail("c_ref outside [500, 5000] m/s");
  if ((cfg.n_elements - 1) * cfg.pitch > cfg.grid_width)
    fail("array footprint wider than the grid");

  if (j.contains("transmit")) {
    const json& t = j["transmit"];
    check_keys(t, {"count", "focal_depth", "f_number"}, "transmit");
    if (t.contains("count")) cfg.n_transmits = t["count"].get<int>();
    if (t.contains("focal_depth")) cfg.focal_depth = t["focal_depth"].get<double>();
    if (t.contains("f_number")) cfg.tx_f_number = t["f_number"].get<double>();
  }
  if (cfg.n_transmits < 1) fail("need at least 1 transmit");
  if (cfg.focal_depth <= 0 || cfg.focal_depth > cfg.grid_depth)
    fail("focal depth outside (0, grid depth]");
  if (cfg.tx_f_number <= 0) fail("transmit F-number must be positive");

  if (j.contains("pulse")) {
    const json& p = j["pulse"];
    check_keys(p, {"fractional_bandwidth"}, "pulse");
    if (p.contains("fractional_bandwidth"))
      cfg.fractional_bandwidth = p["fractional_bandwidth"].get<double>();
  }
  if (cfg.fractional_bandwidth <= 0 || cfg.fractional_bandwidth >= 1)
    fail("fractional bandwidth outside (0, 1)");

  if (j.contains("apodization")) {
    const json& a = j["apodization"];
    check_keys(a, {"rx_f_number", "tx_gate_f_number"}, "apodization");
    if (a.contains("rx_f_number"))
      cfg.apodization.rx_f_number = a["rx_f_number"].get<double>();
    if (a.contains("tx_gate_f_number"))
      cfg.apodization.tx_gate_f_number = a["tx_gate_f_number"].get<double>();
  }
  if (cfg.apodization.rx_f_number <= 0) fail("receive F-number must be positive");
  if (cfg.apodization.tx_gate_f_number < 0) fail("transmit gate F-number negative");

  if (j.contains("preprocess")) {
    const json& p = j["preprocess"];
    check_keys(p, {"median_radius", "smooth_sigma"}, "preprocess");
    if (p.contains("median_radius")) cfg.median_radius = p["median_radius"].get<int>();
    if (p.contains("smooth_sigma")) cfg.smooth_sigma = p["smooth_sigma"].get<double>();
  }
  if (cfg.median_radius < 0 || cfg.median_radius > 10)
    fail("median radius outside [0, 10] nodes");
  if (cfg.smooth_sigma < 0 || cfg.smooth_sigma > 20)
    fail("smooth sigma outside [0, 20] nodes");

  if (j.contains("pixel_grid")) {
    const json& p = j["pixel_grid"];
    check_keys(p, {"dx", "dz"}, "pixel_grid");
    if (p.contains("dx")) cfg.pixel_dx = p["dx"].get<double>();
    if (p.contains("dz")) cfg.pixel_dz = p["dz"].get<double>();
  }
  if (cfg.pixel_dx <= 0 || cfg.pixel_dx > cfg.grid_width ||
      cfg.pixel_dz <= 0 || cfg.pixel_dz > cfg.grid_depth)
    fail("pixel spacing outside (0, extent]");

  if (j.contains("sim")) {
    const json& s = j["sim"];
    check_keys(s, {"fs", "truth_delay_model", "noise_std", "speckle",
                   "speckle_stride"},
               "sim");
    if (s.contains("fs")) cfg.fs = s["fs"].get<double>();
    if (s.contains("truth_delay_model"))
      cfg.truth_delay_model = s["truth_delay_model"].get<std::string>();
    if (s.contains("noise_std")) cfg.noise_std = s["noise_std"].get<double>();
    if (s.contains("speckle")) cfg.speckle = s["speckle"].get<bool>();
    if (s.contains("speckle_stride"))
      cfg.speckle_stride = s["speckle_stride"].get<int>();
  }
  if (cfg.fs < 0) fail("sampling rate negative");
  parse_truth_delay_model(cfg.truth_delay_model);
  if (cfg.noise_std < 0) fail("noise std negative");
  if (cfg.speckle_stride < 1) fail("speckle stride below 1");

  if (j.contains("methods"))
    cfg.methods = j["methods"].get<std::vector<std::string>>();
  if (cfg.methods.empty()) fail("empty method list");
  for (const std::string& m : cfg.methods)
    if (m != "das" && m != "fm-das") fail("unknown method '" + m + "'");

  if (j.contains("dynamic_range_db"))
    cfg.dynamic_range_db = j["dynamic_range_db"].get<double>();
  if (cfg.dynamic_range_db <= 0) fail("dynamic range must be positive");

  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (cfg.threads < 1 || cfg.threads > 256) fail("threads outside [1, 256]");

  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

json config_json(const PipelineConfig& cfg) {
  // json objects serialize with sorted keys, so this dump is canonical
  json j;
  j["version"] = 1;
  j["scenarios"] = cfg.scenarios;
  j["seed"] = cfg.seed;
  j["grid"] = {{"width", cfg.grid_width},
               {"depth", cfg.grid_depth},
               {"dx", cfg.grid_dx},
               {"dz", cfg.grid_dz}};
  j["array"] = {{"n_elements", cfg.n_elements},
                {"pitch", cfg.pitch},
                {"f0", cfg.f0},
                {"c_ref", cfg.c_ref}};
  j["transmit"] = {{"count", cfg.n_transmits},
                   {"focal_depth", cfg.focal_depth},
                   {"f_number", cfg.tx_f_number}};
  j["pulse"] = {{"fractional_bandwidth", cfg.fractional_bandwidth}};
  j["apodization"] = {{"rx_f_number", cfg.apodization.rx_f_number},
                      {"tx_gate_f_number", cfg.apodization.tx_gate_f_number}};
  j["preprocess"] = {{"median_radius", cfg.median_radius},
                     {"smooth_sigma", cfg.smooth_sigma}};
  j["pixel_grid"] = {{"dx", cfg.pixel_dx}, {"dz", cfg.pixel_dz}};
  j["sim"] = {{"fs", cfg.fs},
              {"truth_delay_model", cfg.truth_delay_model},
              {"noise_std", cfg.noise_std},
              {"speckle", cfg.speckle},
              {"speckle_stride", cfg.speckle_stride}};
  j["methods"] = cfg.methods;
  j["dynamic_range_db"] = cfg.dynamic_range_db;
  j["threads"] = cfg.threads;
  return j;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string hash_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot hash missing file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return hex64(fnv1a64(buf.str()));
}

void add_output(StageRecord& rec, const std::string& path) {
  rec.outputs.push_back({path, hash_file(path)});
}

template <typename Fn>
void run_stage(RunManifest& man, const std::string& name, Fn&& fn) {
  StageRecord rec;
  rec.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(rec);
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + name + ": " + e.what());
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cerr << "[" << name << "] " << std::fixed << std::setprecision(2)
            << rec.wall_seconds << " s\n";
  man.stages.push_back(std::move(rec));
}

}  // namespace

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json j;
  j["config_hash"] = manifest.config_hash;
  j["tool_version"] = manifest.tool_version;
  j["stages"] = json::array();
  for (const StageRecord& s : manifest.stages) {
    json outs = json::array();
    for (const StageOutput& o : s.outputs)
      outs.push_back({{"path", o.path}, {"hash", o.hash}});
    j["stages"].push_back({{"name", s.name},
                           {"wall_seconds", s.wall_seconds},
                           {"outputs", outs}});
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write manifest " + tmp);
    os << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

RunManifest run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);

  RunManifest man;
  man.config_hash = hex64(fnv1a64(config_json(cfg).dump()));
  man.tool_version = kVersion;

  const Grid2D grid = cfg.make_grid();
  const Grid2D pixels = cfg.make_pixel_grid();
  const TransducerArray array = cfg.make_array();
  const std::vector<TransmitEvent> events = cfg.make_events(array);
  const PulseSpec pulse = cfg.make_pulse();
  const SimConfig sim = cfg.make_sim_config();
  const double wavelength = cfg.c_ref / cfg.f0;

  std::vector<MethodResult> results;
  for (const std::string& sc : cfg.scenarios) {
    const fs::path sc_dir = fs::path(out_dir) / sc;

    Phantom phantom;
    run_stage(man, "phantom/" + sc, [&](StageRecord& rec) {
      PhantomSpec spec = scenario_spec(parse_scenario(sc), grid);
      spec.speckle = cfg.speckle;
      spec.speckle_stride = cfg.speckle_stride;
      phantom = build_phantom(grid, spec, cfg.seed);
      const std::string dir = (sc_dir / "phantom").string();
      write_phantom_bundle(dir, phantom, sc, cfg.seed);
      add_output(rec, dir + "/sos.eikr");
      add_output(rec, dir + "/registry.json");
      add_output(rec, dir + "/scatterers.f32");
    });

    RfDataSet rf;
    run_stage(man, "rfsim/" + sc, [&](StageRecord& rec) {
      rf = simulate_rf(phantom, array, events, pulse, sim);
      const std::string path = (sc_dir / "rf.eikf").string();
      write_rf(path, rf);
      add_output(rec, path);
    });

    for (const std::string& method : cfg.methods) {
      BeamformedImage img;
      run_stage(man, "beamform/" + sc + "/" + method, [&](StageRecord& rec) {
        std::unique_ptr<DelayProvider> provider;
        if (method == "fm-das") {
          const SosMap smoothed = preprocess_sos(phantom.sos, cfg.median_radius,
                                                 cfg.smooth_sigma);
          provider = std::make_unique<FmDelayProvider>(smoothed, array, events,
                                                       FmConfig{}, cfg.threads);
        } else {
          provider = std::make_unique<GeometricDelayProvider>(array, events,
                                                              cfg.c_ref);
        }
        img = beamform_image(rf, *provider, cfg.apodization, pixels,
                             cfg.dynamic_range_db, cfg.threads);
        const fs::path dir = sc_dir / method;
        fs::create_directories(dir);
        write_raster((dir / "rf_sum.eikr").string(), img.rf_sum);
        write_raster((dir / "envelope.eikr").string(), img.envelope);
        write_raster((dir / "log_db.eikr").string(), img.log_db);
        write_pgm((dir / "image.pgm").string(), img.log_db,
                  -cfg.dynamic_range_db);
        for (const char* f : {"rf_sum.eikr", "envelope.eikr", "log_db.eikr",
                              "image.pgm"})
          add_output(rec, (dir / f).string());
      });

      run_stage(man, "metrics/" + sc + "/" + method, [&](StageRecord&) {
        MethodResult res;
        res.method = method;
        res.scenario = sc;
        res.mean_gds = gds(img.envelope, phantom.registry.point_targets,
                           wavelength)
                           .mean;
        const auto& cysts = phantom.registry.cyst_regions;
        const auto& bgs = phantom.registry.background_regions;
        for (std::size_t i = 0; i < cysts.size() && i < bgs.size(); ++i) {
          const auto cy_mask = rasterize_region(pixels, cysts[i]);
          const auto bg_mask = rasterize_region(pixels, bgs[i]);
          res.gcnr_per_cyst.emplace_back(
              cysts[i].label, gcnr(img.envelope, cy_mask, bg_mask).gcnr);
        }
        results.push_back(std::move(res));
      });
    }
  }

  run_stage(man, "report", [&](StageRecord& rec) {
    const std::string path = (fs::path(out_dir) / "report.csv").string();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << compare_report(results);
    os.close();
    add_output(rec, path);
  });

  write_manifest((fs::path(out_dir) / "manifest.json").string(), man);
  return man;
}

}  // namespace eikr
