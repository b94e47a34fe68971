#include "eikr/eikonal.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <queue>

#include "eikr/parallel.hpp"

namespace eikr {

namespace {

std::atomic<std::uint64_t> g_solve_count{0};

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NodeState : std::uint8_t { kFar = 0, kNarrow = 1, kAccepted = 2 };

struct HeapEntry {
  double t;
  std::int32_t idx;
  bool operator>(const HeapEntry& o) const { return t > o.t; }
};

// The solver works on the factored form tau = tau0 * u, where
// tau0 = |p - source| / c(source) is analytic and u is smooth. Upwind
// differences act on u while grad(tau0) is evaluated exactly, which removes
// the point-source error of the plain scheme; for constant c the march
// reproduces tau0 to round-off. One axis contributes
//   F = u * g + tau0_x * (u - u_nb) / (sign * h)
// with g the analytic gradient component at the update node.
struct AxisTerm {
  double lin;    // coefficient of u in F
  double off;    // constant part of F
  double sign;   // +1 if upwind neighbor on the low-index side
  double tau_nb; // neighbor arrival time
};

struct Solver {
  const SosMap& sos;
  const Grid2D& g;
  double src_x, src_z, c_src;

  std::vector<double> tau;
  std::vector<double> u;
  std::vector<NodeState> state;

  double tau0_at(int i, int k) const {
    const double ddx = g.x_at(i) - src_x;
    const double ddz = g.z_at(k) - src_z;
    return std::sqrt(ddx * ddx + ddz * ddz) / c_src;
  }

  // Analytic gradient of tau0 at a node; zero length only at the source
  // itself, which the init disk freezes.
  void grad_tau0(int i, int k, double& gx, double& gz) const {
    const double ddx = g.x_at(i) - src_x;
    const double ddz = g.z_at(k) - src_z;
    const double r = std::sqrt(ddx * ddx + ddz * ddz);
    if (r == 0.0) {
      gx = gz = 0.0;
      return;
    }
    gx = ddx / (r * c_src);
    gz = ddz / (r * c_src);
  }

  // Candidate arrival from both axes (two-axis Godunov on the factored
  // variable), or +inf when no admissible root exists.
  double two_axis(double tau0x, const AxisTerm& ax, const AxisTerm& az,
                  double slowness) const {
    const double a2 = ax.lin * ax.lin + az.lin * az.lin;
    const double a1 = 2.0 * (ax.lin * ax.off + az.lin * az.off);
    const double a0 = ax.off * ax.off + az.off * az.off - slowness * slowness;
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0 || a2 == 0.0) return kInf;
    const double sq = std::sqrt(disc);
    const double floor_tau = std::max(ax.tau_nb, az.tau_nb);
    double best = kInf;
    for (double root : {(-a1 + sq) / (2.0 * a2), (-a1 - sq) / (2.0 * a2)}) {
      const double t = tau0x * root;
      if (!(t >= floor_tau)) continue;
      // upwind consistency: flow must come from the chosen neighbors
      const double fx = ax.lin * root + ax.off;
      const double fz = az.lin * root + az.off;
      if (fx * ax.sign < -1e-14 || fz * az.sign < -1e-14) continue;
      best = std::min(best, t);
    }
    return best;
  }

  // Single-axis factored update.
  double one_axis(double tau0x, const AxisTerm& a, double slowness) const {
    if (a.lin == 0.0) return kInf;
    double best = kInf;
    for (double f : {slowness, -slowness}) {
      const double root = (f - a.off) / a.lin;
      const double t = tau0x * root;
      if (!(t >= a.tau_nb)) continue;
      if (f * a.sign < -1e-14) continue;
      best = std::min(best, t);
    }
    return best;
  }

  double trial_from_accepted(int i, int k) const {
    const std::size_t id = g.idx(i, k);
    const int nx = g.nx;

    // upwind neighbor per axis = accepted neighbor with the smaller arrival
    double ta = kInf, tb = kInf;
    double sa = 0.0, sb = 0.0;
    if (i > 0 && state[id - 1] == NodeState::kAccepted) {
      ta = tau[id - 1];
      sa = 1.0;
    }
    if (i < nx - 1 && state[id + 1] == NodeState::kAccepted &&
        tau[id + 1] < ta) {
      ta = tau[id + 1];
      sa = -1.0;
    }
    if (k > 0 && state[id - nx] == NodeState::kAccepted) {
      tb = tau[id - nx];
      sb = 1.0;
    }
    if (k < g.nz - 1 && state[id + nx] == NodeState::kAccepted &&
        tau[id + nx] < tb) {
      tb = tau[id + nx];
      sb = -1.0;
    }
    const bool has_a = std::isfinite(ta);
    const bool has_b = std::isfinite(tb);
    if (!has_a && !has_b) return kInf;

    const double slowness = 1.0 / sos.at(i, k);
    const double tau0x = tau0_at(i, k);
    double gx, gz;
    grad_tau0(i, k, gx, gz);

    AxisTerm ax{}, az{};
    if (has_a) {
      const std::size_t na = sa > 0 ? id - 1 : id + 1;
      ax.lin = gx + tau0x / (sa * g.dx);
      ax.off = -tau0x * u[na] / (sa * g.dx);
      ax.sign = sa;
      ax.tau_nb = ta;
    }
    if (has_b) {
      const std::size_t nb = sb > 0 ? id - nx : id + nx;
      az.lin = gz + tau0x / (sb * g.dz);
      az.off = -tau0x * u[nb] / (sb * g.dz);
      az.sign = sb;
      az.tau_nb = tb;
    }

    double best = kInf;
    if (has_a && has_b) best = two_axis(tau0x, ax, az, slowness);
    if (has_a) best = std::min(best, one_axis(tau0x, ax, slowness));
    if (has_b) best = std::min(best, one_axis(tau0x, az, slowness));
    if (!std::isfinite(best)) {
      // unfactored one-sided update as a last resort
      if (has_a) best = std::min(best, ta + g.dx * slowness);
      if (has_b) best = std::min(best, tb + g.dz * slowness);
    }
    return best;
  }
};

}  // namespace

TravelTimeField solve_eikonal(const SosMap& sos, double source_x,
                              double source_z, const FmConfig& cfg,
                              FmStats* stats) {
  const Grid2D& g = sos.grid();
  if (!g.contains(source_x, source_z))
    throw std::invalid_argument("eikonal source outside grid bounds");

  const double hmax = std::max(g.dx, g.dz);
  const double disk_r = cfg.source_disk_radius > 0.0 ? cfg.source_disk_radius
                                                     : 3.0 * hmax;
  if (disk_r < hmax)
    throw std::invalid_argument("source disk radius below max(dx, dz)");

  const int nx = g.nx;
  const int nz = g.nz;
  const std::size_t n = g.size();

  Solver s{sos, g, source_x, source_z, sos.sample(source_x, source_z),
           std::vector<double>(n, kInf), std::vector<double>(n, 0.0),
           std::vector<NodeState>(n, NodeState::kFar)};

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;

  // Analytic initialization: freeze every node within the source disk at
  // distance / c(source), i.e. u = 1.
  const FracIndex fsrc = world_to_index(g, source_x, source_z);
  const int i_lo = std::max(0, static_cast<int>(std::floor(fsrc.i - disk_r / g.dx)));
  const int i_hi = std::min(nx - 1, static_cast<int>(std::ceil(fsrc.i + disk_r / g.dx)));
  const int k_lo = std::max(0, static_cast<int>(std::floor(fsrc.k - disk_r / g.dz)));
  const int k_hi = std::min(nz - 1, static_cast<int>(std::ceil(fsrc.k + disk_r / g.dz)));
  for (int k = k_lo; k <= k_hi; ++k) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const double ddx = g.x_at(i) - source_x;
      const double ddz = g.z_at(k) - source_z;
      const double dist = std::sqrt(ddx * ddx + ddz * ddz);
      if (dist <= disk_r) {
        const std::size_t id = g.idx(i, k);
        s.tau[id] = dist / s.c_src;
        s.u[id] = 1.0;
        s.state[id] = NodeState::kAccepted;
      }
    }
  }

  auto relax = [&](int i, int k) {
    const std::size_t id = g.idx(i, k);
    if (s.state[id] == NodeState::kAccepted) return;
    const double trial = s.trial_from_accepted(i, k);
    if (trial < s.tau[id]) {
      s.tau[id] = trial;
      s.u[id] = trial / s.tau0_at(i, k);
      s.state[id] = NodeState::kNarrow;
      heap.push({trial, static_cast<std::int32_t>(id)});
    }
  };

  // Narrow band around the frozen disk.
  for (int k = std::max(0, k_lo - 1); k <= std::min(nz - 1, k_hi + 1); ++k)
    for (int i = std::max(0, i_lo - 1); i <= std::min(nx - 1, i_hi + 1); ++i)
      relax(i, k);

  FmStats local;
  double last_accepted = 0.0;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    ++local.heap_pops;
    const std::size_t id = static_cast<std::size_t>(top.idx);
    if (s.state[id] == NodeState::kAccepted || top.t > s.tau[id]) continue;
    s.state[id] = NodeState::kAccepted;
    ++local.accepted_from_heap;
    if (top.t < last_accepted) local.monotone_accept_order = false;
    last_accepted = top.t;

    const int i = static_cast<int>(id % nx);
    const int k = static_cast<int>(id / nx);
    if (i > 0) relax(i - 1, k);
    if (i < nx - 1) relax(i + 1, k);
    if (k > 0) relax(i, k - 1);
    if (k < nz - 1) relax(i, k + 1);
  }

  TravelTimeField field;
  field.t = FieldF(g);
  for (std::size_t m = 0; m < n; ++m)
    field.t.v[m] = static_cast<float>(s.tau[m]);
  field.source_x = source_x;
  field.source_z = source_z;
  field.source_c = s.c_src;
  field.source_disk_radius = disk_r;

  g_solve_count.fetch_add(1, std::memory_order_relaxed);
  if (stats) *stats = local;
  return field;
}

std::vector<TravelTimeField> solve_receive_fields(const SosMap& sos,
                                                  const TransducerArray& array,
                                                  const FmConfig& cfg,
                                                  int threads) {
  const Grid2D& g = sos.grid();
  for (double x : array.element_x) {
    if (!g.contains(x, 0.0))
      throw std::invalid_argument("array element outside grid extent");
  }
  std::vector<TravelTimeField> fields(array.n_elements);
  parallel_for(array.n_elements, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      fields[i] = solve_eikonal(sos, array.element_x[i], 0.0, cfg);
  });
  return fields;
}

std::uint64_t eikonal_solve_count() {
  return g_solve_count.load(std::memory_order_relaxed);
}

void reset_eikonal_solve_count() {
  g_solve_count.store(0, std::memory_order_relaxed);
}

}  // namespace eikr
