#pragma once

#include "eikr/beamform.hpp"
#include "eikr/grid.hpp"

// Reference implementations kept deliberately naive and independent of the
// library code paths they check. Shared by the unit tests and the acceptance
// harness.
namespace oracle {

// First-arrival time across a single horizontal interface at depth z_if
// (speed c1 above, c2 below) from a surface point (x0, 0) to an end point
// (x1, z1) strictly below the interface. Minimizes the two-segment path over
// the crossing abscissa by dense scanning; no eikonal machinery involved.
double fermat_two_layer(double x0, double x1, double z1, double z_if,
                        double c1, double c2, double scan_step = 1e-6);

// Delay-and-sum written as the obvious pixel/transmit/element triple loop
// with its own hanning weights and trace interpolation. Shares only the
// delay provider with the production path.
eikr::FieldD naive_das(const eikr::RfDataSet& rf,
                       const eikr::DelayProvider& delays, double rx_f_number,
                       const eikr::Grid2D& pixels);

// Envelope magnitude by direct O(n^2) discrete Fourier transforms (forward,
// one-sided doubling, inverse), checking the FFT-based production path.
std::vector<double> naive_analytic_envelope(const std::vector<double>& x);

}  // namespace oracle
