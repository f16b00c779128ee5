#include "ealign/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

Index cover_count_1d(const std::vector<double>& pts, double r) {
  Index count = 0;
  size_t i = 0;
  while (i < pts.size()) {
    const double reach = pts[i] + 2.0 * r;
    ++count;
    while (i < pts.size() && pts[i] <= reach) ++i;
  }
  return count;
}

DimensionEstimate box_dimension(std::vector<double> pts, const RadiiSchedule& sched,
                                double min_r, double max_r, double noise_floor) {
  DimensionEstimate de;
  de.source_tag = "box-counting";
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) {
    de.estimate = 0.0;  // degenerate single-point set
    return de;
  }
  const double diam = pts.back() - pts.front();
  if (max_r <= 0.0) max_r = diam / 10.0;
  if (min_r <= 0.0) min_r = 3.0 * noise_floor;
  double r0 = sched.r0 > 0.0 ? sched.r0 : max_r;
  int count = sched.count;
  if (count <= 0) {
    count = 0;
    for (double r = r0; r >= std::max(min_r, 1e-300) && count < 64; r *= 0.5) ++count;
  }
  de.radii.resize(count);
  de.values.resize(count);
  de.used.assign(static_cast<size_t>(count), 0);
  std::vector<double> lx, ly;
  for (int k = 0; k < count; ++k) {
    const double r = r0 * std::pow(2.0, -k);
    de.radii[k] = r;
    de.values[k] = static_cast<double>(cover_count_1d(pts, r));
    if (r >= min_r && r <= max_r && de.values[k] >= 1.0) {
      de.used[static_cast<size_t>(k)] = 1;
      lx.push_back(-std::log(2.0 * r));
      ly.push_back(std::log(de.values[k]));
    }
  }
  if (lx.size() < 5)
    throw EalignError("box_dimension: fewer than 5 radii inside the fit window");
  de.fit = fit_line(Eigen::Map<const ArrayXd>(lx.data(), static_cast<Index>(lx.size())),
                    Eigen::Map<const ArrayXd>(ly.data(), static_cast<Index>(ly.size())));
  de.estimate = de.fit.slope;
  return de;
}

DimensionEstimate local_dimension(const Decomp1D& d, double x, const RadiiSchedule& sched) {
  DimensionEstimate de;
  de.source_tag = "local-dimension";
  if (sched.count < 5) throw EalignError("local_dimension: need >= 5 radii");
  de.radii.resize(sched.count);
  de.values.resize(sched.count);
  de.used.assign(static_cast<size_t>(sched.count), 0);
  std::vector<double> lx, ly;
  for (int k = 0; k < sched.count; ++k) {
    const double r = sched.r0 * std::pow(2.0, -k);
    de.radii[k] = r;
    de.values[k] = ball_mass(d, x, r);
    if (k == 0 && de.values[k] <= 0.0)
      throw EalignError("local_dimension: x outside the support of the measure");
    if (de.values[k] > 0.0) {
      de.used[static_cast<size_t>(k)] = 1;
      lx.push_back(std::log(r));
      ly.push_back(std::log(de.values[k]));
    }
  }
  if (lx.size() < 5)
    throw EalignError("local_dimension: fewer than 5 radii with positive mass");
  de.fit = fit_line(Eigen::Map<const ArrayXd>(lx.data(), static_cast<Index>(lx.size())),
                    Eigen::Map<const ArrayXd>(ly.data(), static_cast<Index>(ly.size())));
  de.estimate = de.fit.slope;
  return de;
}

CantorPrediction cantor_prediction(double gamma, double beta, int k_smoothness) {
  if (!(gamma > 0.0 && gamma < 1.0 / 3.0))
    throw EalignError("cantor_prediction: gamma must lie in (0, 1/3)");
  if (!(beta > 0.0 && beta < 1.0))
    throw EalignError("cantor_prediction: beta must lie in (0, 1)");
  CantorPrediction cp;
  cp.dim = std::log(2.0) / (-std::log(beta * gamma));
  cp.smoothness_k = std::max(
      0, static_cast<int>(std::floor(std::log(beta) / std::log(gamma) + 1e-12)));
  const int k = k_smoothness > 0 ? k_smoothness : cp.smoothness_k;
  cp.ck_ceiling = 1.0 / (k + 1.0);  // dim_box(Z) = 1 for fat Cantor sets
  return cp;
}

double frostman_ratio(const std::vector<Atom>& mu_z, double s_exponent, double r_min,
                      double r_max) {
  if (mu_z.empty()) return 0.0;
  double worst = 0.0;
  for (const Atom& center : mu_z) {
    for (double r = r_max; r >= r_min; r *= 0.5) {
      double m = 0.0;
      for (const Atom& a : mu_z)
        if (std::abs(a.x1 - center.x1) < r) m += a.mass;
      worst = std::max(worst, m / std::pow(r, s_exponent));
    }
  }
  return worst;
}

}  // namespace ealign
