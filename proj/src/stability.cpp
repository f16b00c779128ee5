#include "ealign/stability.hpp"

#include "ealign/measure.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

StabilityConstants stability_constants(const FlockingConstants& fc, double M0,
                                       double grad_u0_sup) {
  StabilityConstants k;
  k.a = fc.a;
  k.b = fc.b;
  k.c = 0.5 * fc.b;
  const double g = grad_u0_sup;
  if (fc.a > 0.0) {
    const double sa = std::sqrt(fc.a);
    k.amplification = std::exp(2.0 * sa / fc.b);
    const double mx = std::max(sa, 1.0);
    k.C_X = k.amplification * mx / sa;
    k.C_V = k.amplification * mx;
    k.envelope_grad_x = k.amplification * std::sqrt(fc.a + g * g) / sa;
  } else {
    // Gradient-free kernel: v̇ ≤ −b v integrates exactly.
    k.amplification = 1.0;
    k.C_X = std::max(1.0, 1.0 / fc.b);
    k.C_V = 1.0;
    k.envelope_grad_x = 1.0 + g / fc.b;
  }
  k.C_W = k.envelope_grad_x + M0 * k.C_X;
  k.C = std::max({k.C_X, k.C_V, k.C_W});
  return k;
}

StabilityReport run_pair(const Scenario& s1, const Scenario& s2,
                         const IntegratorConfig& cfg) {
  if (s1.dim != 1 || s2.dim != 1)
    throw EalignError("run_pair: stability pairs are 1D");
  if (s1.labels() != s2.labels() || (s1.a1 != s2.a1).any())
    throw EalignError("run_pair: scenarios must share the label grid");
  if ((s1.w != s2.w).any())
    throw EalignError("run_pair: scenarios must share label weights");
  if (std::abs(s1.M0 - s2.M0) > 1e-12 * s1.M0)
    throw EalignError("run_pair: equal total masses required");
  if (s1.omega.lo[0] != s2.omega.lo[0] || s1.omega.hi[0] != s2.omega.hi[0])
    throw EalignError("run_pair: common support box required");
  const double scale = std::max(s1.u0_sup(), s2.u0_sup());
  if (std::abs(blocked_sum(s1.w * s1.u0)) > 1e-10 * s1.M0 * std::max(scale, 1e-300) ||
      std::abs(blocked_sum(s2.w * s2.u0)) > 1e-10 * s2.M0 * std::max(scale, 1e-300))
    throw EalignError("run_pair: zero momenta required");

  StabilityReport rep;
  // Probe run fixes the recording schedule; both runs then integrate on that
  // same fixed schedule (identical scenarios give bit-identical trajectories).
  const TrajectoryRecord probe = integrate(s1, cfg);
  std::vector<double> times;
  for (const Frame& f : probe.frames)
    if (f.t > 0.0) times.push_back(f.t);
  IntegratorConfig cfg2 = cfg;
  cfg2.tol_align = 0.0;
  cfg2.t_max = times.empty() ? cfg.t_max : times.back();
  const TrajectoryRecord r1 = integrate(s1, cfg2, &times);
  const TrajectoryRecord r2 = integrate(s2, cfg2, &times);

  const size_t nf = std::min(r1.frames.size(), r2.frames.size());
  rep.times.resize(static_cast<Index>(nf));
  rep.gap_x.resize(static_cast<Index>(nf));
  rep.gap_v.resize(static_cast<Index>(nf));
  rep.w1_t.resize(static_cast<Index>(nf));
  for (size_t k = 0; k < nf; ++k) {
    const Frame& f1 = r1.frames[k];
    const Frame& f2 = r2.frames[k];
    if (std::abs(f1.t - f2.t) > 1e-9)
      throw EalignError("run_pair: recording schedules diverged");
    rep.times[static_cast<Index>(k)] = f1.t;
    rep.gap_x[static_cast<Index>(k)] = (f1.X - f2.X).abs().maxCoeff();
    rep.gap_v[static_cast<Index>(k)] = (f1.V - f2.V).abs().maxCoeff();
    rep.w1_t[static_cast<Index>(k)] =
        w1_distance_1d(weighted_points_1d(s1.m0, f1.X.head(s1.n_ac)),
                       weighted_points_1d(s2.m0, f2.X.head(s2.n_ac)));
  }
  rep.w1_m0 = w1_distance_1d(weighted_points_1d(s1.m0, s1.a1.head(s1.n_ac)),
                             weighted_points_1d(s2.m0, s2.a1.head(s2.n_ac)));
  rep.du0_inf = (s1.u0 - s2.u0).abs().maxCoeff();

  // Both ran on the fixed schedule; the probe confirmed alignment at its end.
  TrajectoryRecord r1a = r1, r2a = r2;
  r1a.aligned = r2a.aligned = probe.aligned;
  const LimitReport l1 = limit_flow_map(s1, r1a);
  const LimitReport l2 = limit_flow_map(s2, r2a);
  rep.w1_limit = w1_distance_1d(weighted_points_1d(s1.m0, l1.xbar.head(s1.n_ac)),
                                weighted_points_1d(s2.m0, l2.xbar.head(s2.n_ac)));

  const double grad_u0 = std::max(r1.frames[0].dV1.abs().maxCoeff(),
                                  r2.frames[0].dV1.abs().maxCoeff());
  rep.k = stability_constants(r1.fc, s1.M0, grad_u0);
  const double input = rep.w1_m0 + rep.du0_inf;
  const double slack = 1e-6;

  BoundCheck bx, bv, bw;
  bx.name = "stability-X(2.14)";
  bv.name = "stability-V(2.15)";
  bw.name = "stability-W1-chain";
  bx.worst = bv.worst = bw.worst = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < rep.times.size(); ++k) {
    const double t = rep.times[k];
    ++bx.checked;
    ++bv.checked;
    ++bw.checked;
    const double mx = rep.k.C * input + slack - rep.gap_x[k];
    const double mv = rep.k.C * std::exp(-rep.k.c * t) * input + slack - rep.gap_v[k];
    const double mw = rep.k.envelope_grad_x * rep.w1_m0 + s1.M0 * rep.gap_x[k] + slack -
                      rep.w1_t[k];
    bx.worst = std::min(bx.worst, mx);
    bv.worst = std::min(bv.worst, mv);
    bw.worst = std::min(bw.worst, mw);
    if (mx < 0.0) ++bx.violations;
    if (mv < 0.0) ++bv.violations;
    if (mw < 0.0) ++bw.violations;
  }
  BoundCheck bl;
  bl.name = "stability-W1-limit";
  bl.checked = 1;
  bl.worst = rep.k.C * input + slack - rep.w1_limit;
  if (bl.worst < 0.0) bl.violations = 1;
  bx.passed = bx.violations == 0;
  bv.passed = bv.violations == 0;
  bw.passed = bw.violations == 0;
  bl.passed = bl.violations == 0;
  rep.checks = {bx, bv, bw, bl};
  rep.passed = bx.passed && bv.passed && bw.passed && bl.passed;
  return rep;
}

}  // namespace ealign
