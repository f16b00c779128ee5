// Fractal geometry of the concentration set: exact 1D box-counting, local
// dimension of the limiting measure, and the analytic Cantor predictions.
#pragma once

#include "ealign/common.hpp"
#include "ealign/fit.hpp"
#include "ealign/limits.hpp"

#include <string>
#include <vector>

namespace ealign {

struct RadiiSchedule {
  double r0 = 0.0;  // largest radius; r_k = r0 · 2^{-k}
  int count = 0;
};

struct DimensionEstimate {
  ArrayXd radii;
  ArrayXd values;        // N(r) counts or ball masses
  std::vector<char> used;  // inside the fit window
  LineFit fit;
  double estimate = 0.0;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  std::string source_tag;
};

// Minimal number of radius-r intervals covering a finite point set (exact
// greedy sweep in 1D).
Index cover_count_1d(const std::vector<double>& sorted_pts, double r);

// Box-counting estimate: slope of ln N(r) against −ln(2r) over the window
// min_r ≤ r ≤ max_r (pass 0 to default to [3·noise_floor, diam/10]).
DimensionEstimate box_dimension(std::vector<double> pts, const RadiiSchedule& sched,
                                double min_r = 0.0, double max_r = 0.0,
                                double noise_floor = 0.0);

// Local dimension d(x, m̄): slope of ln m̄((x−r, x+r)) against ln r.
DimensionEstimate local_dimension(const Decomp1D& d, double x,
                                  const RadiiSchedule& sched);

struct CantorPrediction {
  double dim = 0.0;          // ln 2 / (−ln βγ)
  double ck_ceiling = 0.0;   // dim_box(Z)/(k+1) with dim_box(Z) = 1
  int smoothness_k = 0;      // largest k with β ≤ γ^k
};
CantorPrediction cantor_prediction(double gamma, double beta, int k_smoothness);

// Frostman-style ratio sup m̄_Z(B(x,r))/r^s over sampled centers and radii.
double frostman_ratio(const std::vector<Atom>& mu_z, double s_exponent, double r_min,
                      double r_max);

}  // namespace ealign
