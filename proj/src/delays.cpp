#include "eikr/delays.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eikr/parallel.hpp"

namespace eikr {

std::vector<TransmitEvent> make_transmit_events(const TransducerArray& array,
                                                int n_transmits,
                                                double focal_depth,
                                                double tx_f_number) {
  if (n_transmits < 1) throw std::invalid_argument("need at least 1 transmit");
  if (focal_depth <= 0.0) throw std::invalid_argument("focal depth must be positive");
  if (tx_f_number <= 0.0) throw std::invalid_argument("transmit F-number must be positive");

  const double x_lo = array.element_x.front();
  const double x_hi = array.element_x.back();
  const double half_width = focal_depth / (2.0 * tx_f_number);

  std::vector<TransmitEvent> events;
  events.reserve(n_transmits);
  for (int j = 0; j < n_transmits; ++j) {
    TransmitEvent ev;
    ev.index = j;
    ev.focus_x = n_transmits == 1
                     ? 0.5 * (x_lo + x_hi)
                     : x_lo + (x_hi - x_lo) * j / (n_transmits - 1);
    ev.focus_z = focal_depth;

    // contiguous run of elements within the aperture half-width, clipped at
    // the edges; fall back to the nearest element for degenerate widths
    auto lo = std::lower_bound(array.element_x.begin(), array.element_x.end(),
                               ev.focus_x - half_width - 1e-12);
    auto hi = std::upper_bound(array.element_x.begin(), array.element_x.end(),
                               ev.focus_x + half_width + 1e-12);
    if (lo == hi) {
      auto nearest = std::min_element(
          array.element_x.begin(), array.element_x.end(),
          [&](double a, double b) {
            return std::abs(a - ev.focus_x) < std::abs(b - ev.focus_x);
          });
      lo = nearest;
      hi = nearest + 1;
    }
    ev.first_element = static_cast<int>(lo - array.element_x.begin());
    ev.n_aperture = static_cast<int>(hi - lo);
    ev.center_x = 0.5 * (*lo + *(hi - 1));
    ev.center_z = 0.0;

    ev.apodization.resize(ev.n_aperture);
    if (ev.n_aperture == 1) {
      ev.apodization[0] = 1.0f;
    } else {
      for (int k = 0; k < ev.n_aperture; ++k)
        ev.apodization[k] = static_cast<float>(
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k /
                                 (ev.n_aperture - 1)));
    }
    events.push_back(std::move(ev));
  }
  return events;
}

double geometric_tx_delay(const TransmitEvent& event, double x, double z,
                          double c_ref) {
  if (c_ref <= 0.0) throw std::invalid_argument("c_ref must be positive");
  const double fx = event.focus_x - event.center_x;
  const double fz = event.focus_z - event.center_z;
  const double tau_foc = std::sqrt(fx * fx + fz * fz) / c_ref;
  const double px = x - event.focus_x;
  const double pz = z - event.focus_z;
  double tau_foc_p = std::sqrt(px * px + pz * pz) / c_ref;
  if (z < event.focus_z) tau_foc_p = -tau_foc_p;
  return tau_foc + tau_foc_p;
}

double geometric_rx_delay(double element_x, double element_z, double x,
                          double z, double c_ref) {
  if (c_ref <= 0.0) throw std::invalid_argument("c_ref must be positive");
  const double dx = x - element_x;
  const double dz = z - element_z;
  return std::sqrt(dx * dx + dz * dz) / c_ref;
}

double fm_tx_delay(const TransmitEvent& event,
                   const TravelTimeField& tt_from_center,
                   const TravelTimeField& tt_from_focus, double x, double z) {
  const double tau_foc =
      tt_from_center.sample(event.focus_x, event.focus_z);
  double tau_foc_p = tt_from_focus.sample(x, z);
  if (z < event.focus_z) tau_foc_p = -tau_foc_p;
  return tau_foc + tau_foc_p;
}

double fm_rx_delay(const std::vector<TravelTimeField>& receive_fields,
                   int element, double x, double z) {
  if (element < 0 || static_cast<std::size_t>(element) >= receive_fields.size())
    throw std::out_of_range("element index outside receive field set");
  return receive_fields[element].sample(x, z);
}

GeometricDelayProvider::GeometricDelayProvider(const TransducerArray& array,
                                               std::vector<TransmitEvent> events,
                                               double c_ref)
    : array_(array), events_(std::move(events)), c_ref_(c_ref) {
  if (c_ref_ <= 0.0) throw std::invalid_argument("c_ref must be positive");
  if (events_.empty()) throw std::invalid_argument("no transmit events");
}

double GeometricDelayProvider::tx_delay(int transmit, double x, double z) const {
  return geometric_tx_delay(events_.at(transmit), x, z, c_ref_);
}

double GeometricDelayProvider::rx_delay(int element, double x, double z) const {
  return geometric_rx_delay(array_.element_x.at(element), 0.0, x, z, c_ref_);
}

FmDelayProvider::FmDelayProvider(const SosMap& sos,
                                 const TransducerArray& array,
                                 std::vector<TransmitEvent> events,
                                 const FmConfig& cfg, int threads)
    : array_(array), events_(std::move(events)) {
  if (events_.empty()) throw std::invalid_argument("no transmit events");

  receive_fields_ = solve_receive_fields(sos, array_, cfg, threads);

  const std::size_t m = events_.size();
  tau_foc_.resize(m);
  focus_fields_.resize(m);
  parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const TransmitEvent& ev = events_[j];
      TravelTimeField from_center =
          solve_eikonal(sos, ev.center_x, ev.center_z, cfg);
      tau_foc_[j] = from_center.sample(ev.focus_x, ev.focus_z);
      focus_fields_[j] = solve_eikonal(sos, ev.focus_x, ev.focus_z, cfg);
    }
  });
}

double FmDelayProvider::tx_delay(int transmit, double x, double z) const {
  const TransmitEvent& ev = events_.at(transmit);
  double tau_foc_p = focus_fields_[transmit].sample(x, z);
  if (z < ev.focus_z) tau_foc_p = -tau_foc_p;
  return tau_foc_[transmit] + tau_foc_p;
}

double FmDelayProvider::rx_delay(int element, double x, double z) const {
  return receive_fields_.at(element).sample(x, z);
}

const TravelTimeField& FmDelayProvider::receive_field(int element) const {
  return receive_fields_.at(element);
}

DelayTables::DelayTables(const DelayProvider& provider, const Grid2D& pixels,
                         std::size_t max_bytes)
    : provider_(provider), pixels_(pixels), max_bytes_(max_bytes) {
  if (max_bytes_ == 0) throw std::invalid_argument("table cache needs a byte budget");
}

const FieldF& DelayTables::table(int transmit, int element) {
  if (transmit < 0 || transmit >= provider_.transmit_count())
    throw std::out_of_range("transmit index outside event list");
  if (element < 0 || element >= provider_.element_count())
    throw std::out_of_range("element index outside array");

  const std::uint64_t key =
      (static_cast<std::uint64_t>(transmit) << 32) |
      static_cast<std::uint32_t>(element);
  if (auto it = index_.find(key); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return lru_.front().second;
  }

  FieldF t(pixels_);
  for (int k = 0; k < pixels_.nz; ++k) {
    const double z = pixels_.z_at(k);
    for (int i = 0; i < pixels_.nx; ++i) {
      const double x = pixels_.x_at(i);
      t.v[pixels_.idx(i, k)] = static_cast<float>(
          provider_.tx_delay(transmit, x, z) +
          provider_.rx_delay(element, x, z));
    }
  }

  const std::size_t sz = t.v.size() * sizeof(float);
  while (bytes_ + sz > max_bytes_ && !lru_.empty()) {
    bytes_ -= lru_.back().second.v.size() * sizeof(float);
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  lru_.emplace_front(key, std::move(t));
  index_[key] = lru_.begin();
  bytes_ += sz;
  return lru_.front().second;
}

}  // namespace eikr
