// Small least-squares helpers for log-linear rate and dimension fits.
#pragma once

#include "ealign/common.hpp"

namespace ealign {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual of y about the fitted line
  bool valid = false;
};

inline LineFit fit_line(const ArrayXd& x, const ArrayXd& y) {
  LineFit f;
  const Index n = x.size();
  if (n < 2 || y.size() != n) return f;
  const double mx = x.mean(), my = y.mean();
  const double sxx = ((x - mx) * (x - mx)).sum();
  if (sxx <= 0.0) return f;
  f.slope = ((x - mx) * (y - my)).sum() / sxx;
  f.intercept = my - f.slope * mx;
  f.residual = std::sqrt((y - (f.intercept + f.slope * x)).square().mean());
  f.valid = true;
  return f;
}

// Fits y(t) ~ y0 * exp(-c (t - t0)) through positive samples; returns the
// decay rate c > 0, or invalid if the tail is non-monotone or non-positive.
struct TailFit {
  double rate = 0.0;
  bool valid = false;
};

inline TailFit fit_decay_rate(const ArrayXd& t, const ArrayXd& y) {
  TailFit out;
  const Index n = t.size();
  if (n < 2 || y.size() != n) return out;
  for (Index i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) return out;
    if (i > 0 && y[i] >= y[i - 1]) return out;  // tail must decay monotonically
  }
  const LineFit lf = fit_line(t, y.log());
  if (!lf.valid || !(lf.slope < 0.0)) return out;
  out.rate = -lf.slope;
  out.valid = true;
  return out;
}

}  // namespace ealign
