#pragma once

// Closed forms in 50-digit arithmetic; the cancellation in sin x - x cos x
// costs about 2 log10(1/x) digits, which the extra precision absorbs.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace qtransport::testing {

using big = boost::multiprecision::cpp_bin_float_50;

struct ReferenceRates {
  double alpha1, alpha2, f, g;
  /// Sum of absolute term sizes for each form, for cancellation-aware comparisons.
  double scale_f, scale_g;
};

inline ReferenceRates reference_rates(double xd) {
  const big x = xd;
  const big s = sin(x), c = cos(x), x3 = x * x * x;
  ReferenceRates r;
  r.alpha1 = static_cast<double>(3 * (s - x * c) / x3);
  r.alpha2 = static_cast<double>(3 * (x * c + (x * x - 1) * s) / (2 * x3));
  r.f = static_cast<double>((c + x * s) / x3);
  r.g = static_cast<double>(((x * x - 1) * c - x * s) / x3);
  r.scale_f = static_cast<double>((abs(c) + abs(x * s)) / x3);
  r.scale_g = static_cast<double>((abs((x * x - 1) * c) + abs(x * s)) / x3);
  return r;
}

}  // namespace qtransport::testing
