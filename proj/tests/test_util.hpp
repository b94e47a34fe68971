#pragma once

#include <doctest.h>

namespace testutil {

// doctest's Approx defaults to scale = 1, which turns epsilon into an
// absolute tolerance for values far below unity (travel times are ~1e-5 s).
// This variant is purely relative.
inline doctest::Approx rel(double value, double tolerance) {
  return doctest::Approx(value).epsilon(tolerance).scale(0.0);
}

}  // namespace testutil
