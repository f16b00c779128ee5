// Adaptive Gauss–Kronrod (7,15) quadrature on finite intervals.
#pragma once

#include "ealign/common.hpp"

#include <functional>

namespace ealign {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;  // achieved error estimate
  bool converged = true;
  int evaluations = 0;
};

// Integrates f over [a, b] to the requested relative tolerance (with a small
// absolute floor). Interval bisection on the Kronrod error estimate.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14,
                        int max_depth = 48);

// Convenience wrapper that throws on non-convergence, carrying the achieved
// tolerance in the message.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace ealign
