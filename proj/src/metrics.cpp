#include "eikr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eikr {

namespace {

constexpr double kDbFloor = 1e-3;          // -60 dB relative to image max
constexpr double kHalfAmp = 0.5011872336;  // 10^(-6/20)

// parabolic three-point refinement; returns the fractional offset in [-.5,.5]
double refine(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return 0.0;  // not a local maximum profile
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

}  // namespace

GdsReport gds(const FieldD& envelope,
              const std::vector<std::array<double, 2>>& targets,
              double wavelength, double search_radius) {
  if (wavelength <= 0.0) throw std::invalid_argument("wavelength must be positive");
  if (search_radius <= 0.0) search_radius = 2.5 * wavelength;
  if (search_radius < wavelength)
    throw std::invalid_argument("search radius below one wavelength");

  const Grid2D& g = envelope.grid;
  const double image_max = *std::max_element(envelope.v.begin(), envelope.v.end());
  const double floor = image_max * kDbFloor;

  GdsReport report;
  report.targets.reserve(targets.size());
  for (const auto& t : targets) {
    if (!g.contains(t[0], t[1]))
      throw std::invalid_argument("gds target outside the image");
    GdsTarget out;
    out.truth = t;

    const int i_lo = std::max(0, static_cast<int>(std::ceil((t[0] - search_radius - g.origin_x) / g.dx)));
    const int i_hi = std::min(g.nx - 1, static_cast<int>(std::floor((t[0] + search_radius - g.origin_x) / g.dx)));
    const int k_lo = std::max(0, static_cast<int>(std::ceil((t[1] - search_radius - g.origin_z) / g.dz)));
    const int k_hi = std::min(g.nz - 1, static_cast<int>(std::floor((t[1] + search_radius - g.origin_z) / g.dz)));

    int pi = -1, pk = -1;
    double peak = -1.0;
    for (int k = k_lo; k <= k_hi; ++k)
      for (int i = i_lo; i <= i_hi; ++i)
        if (const double v = envelope.v[g.idx(i, k)]; v > peak) {
          peak = v;
          pi = i;
          pk = k;
        }

    if (pi < 0 || peak <= floor) {
      // nothing detectable near the truth: counted as distorted
      report.targets.push_back(out);
      continue;
    }
    out.found = true;

    double off_x = 0.0, off_z = 0.0;
    if (pi > 0 && pi < g.nx - 1)
      off_x = refine(envelope.v[g.idx(pi - 1, pk)], peak,
                     envelope.v[g.idx(pi + 1, pk)]);
    if (pk > 0 && pk < g.nz - 1)
      off_z = refine(envelope.v[g.idx(pi, pk - 1)], peak,
                     envelope.v[g.idx(pi, pk + 1)]);
    out.peak = {g.x_at(pi) + off_x * g.dx, g.z_at(pk) + off_z * g.dz};

    // -6 dB crossings of the lateral profile through the peak row
    const double thr = kHalfAmp * peak;
    bool left_ok = false, right_ok = false;
    for (int i = pi; i > 0; --i) {
      const double v0 = envelope.v[g.idx(i - 1, pk)];
      const double v1 = envelope.v[g.idx(i, pk)];
      if (v0 < thr && v1 >= thr) {
        out.left_x = g.x_at(i - 1) + g.dx * (thr - v0) / (v1 - v0);
        left_ok = true;
        break;
      }
    }
    for (int i = pi; i < g.nx - 1; ++i) {
      const double v0 = envelope.v[g.idx(i, pk)];
      const double v1 = envelope.v[g.idx(i + 1, pk)];
      if (v0 >= thr && v1 < thr) {
        out.right_x = g.x_at(i) + g.dx * (thr - v0) / (v1 - v0);
        right_ok = true;
        break;
      }
    }

    if (left_ok && right_ok) {
      const double zp = out.peak[1];
      auto dist = [&](double x, double z) {
        return std::hypot(x - t[0], z - t[1]);
      };
      const double worst =
          std::max({dist(out.peak[0], out.peak[1]), dist(out.left_x, zp),
                    dist(out.right_x, zp)});
      out.score = worst <= wavelength ? 1 : 0;
    }
    report.targets.push_back(out);
  }

  double sum = 0.0;
  for (const GdsTarget& t : report.targets) sum += t.score;
  report.mean = report.targets.empty() ? 0.0 : sum / report.targets.size();
  return report;
}

GcnrReport gcnr(const FieldD& envelope,
                const std::vector<std::uint8_t>& cyst_mask,
                const std::vector<std::uint8_t>& background_mask,
                int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("gcnr needs at least 2 bins");
  if (cyst_mask.size() != envelope.v.size() ||
      background_mask.size() != envelope.v.size())
    throw std::invalid_argument("mask size does not match image");

  std::vector<double> cy, bg;
  for (std::size_t n = 0; n < envelope.v.size(); ++n) {
    if (cyst_mask[n] && background_mask[n])
      throw std::invalid_argument("gcnr regions overlap");
    if (cyst_mask[n]) cy.push_back(envelope.v[n]);
    if (background_mask[n]) bg.push_back(envelope.v[n]);
  }
  if (cy.empty() || bg.empty())
    throw std::invalid_argument("gcnr region is empty");

  double top = 0.0;
  for (double v : cy) top = std::max(top, v);
  for (double v : bg) top = std::max(top, v);

  GcnrReport rep;
  rep.n_bins = n_bins;
  rep.n_cyst = cy.size();
  rep.n_background = bg.size();
  if (top <= 0.0) {
    rep.gcnr = 0.0;  // both regions identically zero: full overlap
    return rep;
  }

  std::vector<double> h_cy(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> h_bg(static_cast<std::size_t>(n_bins), 0.0);
  auto bin_of = [&](double v) {
    return std::min(n_bins - 1, static_cast<int>(v / top * n_bins));
  };
  for (double v : cy) h_cy[static_cast<std::size_t>(bin_of(v))] += 1.0 / cy.size();
  for (double v : bg) h_bg[static_cast<std::size_t>(bin_of(v))] += 1.0 / bg.size();

  double overlap = 0.0;
  for (int b = 0; b < n_bins; ++b)
    overlap += std::min(h_cy[static_cast<std::size_t>(b)],
                        h_bg[static_cast<std::size_t>(b)]);
  rep.gcnr = std::clamp(1.0 - overlap, 0.0, 1.0);
  return rep;
}

std::string compare_report(const std::vector<MethodResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to report");

  // every method must cover the same scenarios with the same cyst labels
  std::map<std::string, std::set<std::string>> scenarios_of;
  std::vector<std::string> labels;
  for (const MethodResult& r : results) {
    if (!scenarios_of[r.method].insert(r.scenario).second)
      throw std::invalid_argument("duplicate result for " + r.method + "/" +
                                  r.scenario);
    std::vector<std::string> these;
    for (const auto& [label, value] : r.gcnr_per_cyst) these.push_back(label);
    if (labels.empty())
      labels = these;
    else if (labels != these)
      throw std::invalid_argument("cyst label sets differ between results");
  }
  const auto& first_set = scenarios_of.begin()->second;
  for (const auto& [method, set] : scenarios_of)
    if (set != first_set)
      throw std::invalid_argument("scenario sets differ between methods");

  std::ostringstream os;
  os << "method,scenario,mean_gds";
  for (const std::string& label : labels) os << ",gcnr_" << label;
  os << "\n";
  for (const MethodResult& r : results) {
    os << r.method << "," << r.scenario << "," << r.mean_gds;
    for (const auto& [label, value] : r.gcnr_per_cyst) os << "," << value;
    os << "\n";
  }
  return os.str();
}

}  // namespace eikr
