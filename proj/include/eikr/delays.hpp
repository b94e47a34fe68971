#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

#include "eikr/eikonal.hpp"
#include "eikr/medium.hpp"

namespace eikr {

// One focused transmission: a contiguous sub-aperture fired so the beam
// converges at (focus_x, focus_z). The focus acts as a virtual source when
// computing per-pixel transmit delays.
struct TransmitEvent {
  int index = 0;
  int first_element = 0;
  int n_aperture = 0;
  double center_x = 0.0;  // midpoint of the (possibly edge-clipped) aperture
  double center_z = 0.0;
  double focus_x = 0.0;
  double focus_z = 0.0;
  std::vector<float> apodization;  // symmetric hann over the sub-aperture
};

// Lays out n_transmits focal points uniformly across the array footprint at
// the given depth. The sub-aperture width follows the transmit F-number
// (width = depth / f_number) and is clipped at the array edges.
std::vector<TransmitEvent> make_transmit_events(const TransducerArray& array,
                                                int n_transmits,
                                                double focal_depth,
                                                double tx_f_number = 2.0);

// Constant-c delays: virtual-source transmit time plus Euclidean receive
// time. The focus-to-pixel leg is negative for pixels above the focus.
double geometric_tx_delay(const TransmitEvent& event, double x, double z,
                          double c_ref);
double geometric_rx_delay(double element_x, double element_z, double x,
                          double z, double c_ref);

// Eikonal-based counterparts. tt_from_center must be solved with the event's
// aperture center as source and tt_from_focus with its focal point; the
// focus-to-pixel term keeps the same sign rule as the geometric path.
double fm_tx_delay(const TransmitEvent& event,
                   const TravelTimeField& tt_from_center,
                   const TravelTimeField& tt_from_focus, double x, double z);
double fm_rx_delay(const std::vector<TravelTimeField>& receive_fields,
                   int element, double x, double z);

// Query contract shared by both delay models. Implementations are immutable
// after construction, so pixel workers may call them concurrently.
class DelayProvider {
 public:
  virtual ~DelayProvider() = default;
  virtual double tx_delay(int transmit, double x, double z) const = 0;
  virtual double rx_delay(int element, double x, double z) const = 0;
  virtual int transmit_count() const = 0;
  virtual int element_count() const = 0;
};

class GeometricDelayProvider final : public DelayProvider {
 public:
  GeometricDelayProvider(const TransducerArray& array,
                         std::vector<TransmitEvent> events, double c_ref);

  double tx_delay(int transmit, double x, double z) const override;
  double rx_delay(int element, double x, double z) const override;
  int transmit_count() const override { return static_cast<int>(events_.size()); }
  int element_count() const override { return array_.n_elements; }

  const std::vector<TransmitEvent>& events() const { return events_; }

 private:
  TransducerArray array_;
  std::vector<TransmitEvent> events_;
  double c_ref_;
};

// Runs every eikonal solve a full acquisition needs up front: one field per
// element (receive), and per transmit one solve from the aperture center
// (sampled at the focus, then discarded) plus one from the focus (kept).
// That is 2 * transmits + elements solves total — construction cost, queries
// are pure bilinear samples afterwards.
class FmDelayProvider final : public DelayProvider {
 public:
  FmDelayProvider(const SosMap& sos, const TransducerArray& array,
                  std::vector<TransmitEvent> events, const FmConfig& cfg = {},
                  int threads = 1);

  double tx_delay(int transmit, double x, double z) const override;
  double rx_delay(int element, double x, double z) const override;
  int transmit_count() const override { return static_cast<int>(events_.size()); }
  int element_count() const override { return array_.n_elements; }

  const std::vector<TransmitEvent>& events() const { return events_; }
  const TravelTimeField& receive_field(int element) const;

 private:
  TransducerArray array_;
  std::vector<TransmitEvent> events_;
  std::vector<double> tau_foc_;                 // center-to-focus time per transmit
  std::vector<TravelTimeField> focus_fields_;   // one per transmit
  std::vector<TravelTimeField> receive_fields_; // one per element
};

// Materializes per-(transmit, element) round-trip delay rasters on demand,
// keeping recently used tables under a byte budget. Values are exactly
// tx_delay + rx_delay evaluated at each pixel node, so cached and fresh
// tables are bit-identical. Not safe for concurrent use.
class DelayTables {
 public:
  DelayTables(const DelayProvider& provider, const Grid2D& pixels,
              std::size_t max_bytes = std::size_t{256} << 20);

  const FieldF& table(int transmit, int element);
  std::size_t cached_bytes() const { return bytes_; }

 private:
  const DelayProvider& provider_;
  Grid2D pixels_;
  std::size_t max_bytes_;
  std::size_t bytes_ = 0;
  std::list<std::pair<std::uint64_t, FieldF>> lru_;
  std::unordered_map<std::uint64_t,
                     std::list<std::pair<std::uint64_t, FieldF>>::iterator>
      index_;
};

}  // namespace eikr
