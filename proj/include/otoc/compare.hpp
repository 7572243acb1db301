#pragma once

#include <vector>

#include "otoc/series.hpp"

namespace otoc::io {

// Value of a series at path length `ell` by linear interpolation.  The ell
// column must be strictly increasing and bracket the query point.
double value_at_ell(const OtocSeries& s, double ell);

// Power law value(T) = exp(log_prefactor) * T^xi fitted across series
// sampled at one path length.
struct XiFit {
  double xi = 0.0;
  double log_prefactor = 0.0;
  double r2 = 1.0;  // coefficient of determination in log-log space
  int n_temps = 0;
};

// Least-squares regression of log(value at ell_point) against log(kbt) over
// the given series.  Requires at least four distinct positive temperatures
// (taken from each series' meta.kbt) and positive sampled values.
XiFit fit_xi(const std::vector<OtocSeries>& series_by_temperature,
             double ell_point);

// Largest pointwise relative deviation between two curves on a window.
struct DeviationReport {
  double max_relative = 0.0;  // max |other - ref| / |ref|
  double at_ell = 0.0;        // where the maximum occurs
  int n_points = 0;           // samples of `other` inside the window
};

// Walk the samples of `other` with ell in [ell_lo, ell_hi], evaluate `ref`
// there by interpolation, and report the largest relative deviation.  The
// window must contain at least one sample and lie inside ref's range.
DeviationReport max_relative_deviation(const OtocSeries& ref,
                                       const OtocSeries& other,
                                       double ell_lo, double ell_hi);

}  // namespace otoc::io
