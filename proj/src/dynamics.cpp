#include "ealign/dynamics.hpp"

#include "ealign/measure.hpp"
#include "ealign/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

int state_components(const Scenario& s) { return s.dim == 2 ? 6 : 4; }

ArrayXd initial_state(const Scenario& s) {
  const Index N = s.labels();
  ArrayXd y(state_components(s) * N);
  y.segment(0 * N, N) = s.a1;
  y.segment(1 * N, N) = s.u0;
  y.segment(2 * N, N).setOnes();      // ∂₁X(0) = 1
  y.segment(3 * N, N) = s.du0_1;      // ∂₁V(0) = ∂₁u₀
  if (s.dim == 2) {
    y.segment(4 * N, N).setZero();    // ∂₂X(0) = 0
    y.segment(5 * N, N) = s.du0_2;    // ∂₂V(0) = ∂₂u₀
  }
  return y;
}

namespace {

// Generic per-row pair sums with a scalar kernel fallback.
struct RowSums {
  double s0 = 0, s1 = 0;  // Σ wφ, Σ wφV
  double g0 = 0, g1 = 0;  // Σ w ∂₁φ, Σ w ∂₁φ V
  double h0 = 0, h1 = 0;  // Σ w ∂₂φ, Σ w ∂₂φ V (n = 2)
};

RowSums generic_row(const Scenario& s, const ArrayXd& X, const ArrayXd& V, Index i) {
  RowSums r;
  const Index N = s.labels();
  const bool two_d = s.dim == 2;
  for (Index j = 0; j < N; ++j) {
    const double dx = X[i] - X[j];
    const double dy = two_d ? s.a2[i] - s.a2[j] : 0.0;
    const double rr = two_d ? std::hypot(dx, dy) : std::abs(dx);
    const double phi = s.kernel.radial(rr);
    const double w = s.w[j];
    r.s0 += w * phi;
    r.s1 += w * phi * V[j];
    const double dphi = rr > 0.0 ? s.kernel.radial_deriv(rr) / rr : 0.0;
    const double p1 = dphi * dx, p2 = dphi * dy;
    r.g0 += w * p1;
    r.g1 += w * p1 * V[j];
    if (two_d) {
      r.h0 += w * p2;
      r.h1 += w * p2 * V[j];
    }
  }
  return r;
}

}  // namespace

void rhs_full(const Scenario& s, const ArrayXd& y, ArrayXd& dy) {
  const Index N = s.labels();
  const bool two_d = s.dim == 2;
  const double kappa = s.kappa;
  dy.resize(y.size());
  const auto X = y.segment(0 * N, N);
  const auto V = y.segment(1 * N, N);
  const auto dX1 = y.segment(2 * N, N);
  const auto dV1 = y.segment(3 * N, N);
  dy.segment(0 * N, N) = V;
  dy.segment(2 * N, N) = dV1;
  auto Vd = dy.segment(1 * N, N);
  auto dV1d = dy.segment(3 * N, N);
  if (two_d) dy.segment(4 * N, N) = y.segment(5 * N, N);

  if (s.kernel.family() == KernelFamily::Constant) {
    // Σⱼ wⱼ φ (Vᵢ − Vⱼ) = φ (M₀ Vᵢ − Σⱼ wⱼVⱼ); ∂φ ≡ 0.
    const double phi = s.kernel.sup_value();
    const double P = blocked_sum(s.w * V);
    Vd = -kappa * phi * (s.M0 * V - P);
    dV1d = -kappa * phi * s.M0 * dV1;
    if (two_d) dy.segment(5 * N, N) = -kappa * phi * s.M0 * y.segment(5 * N, N);
    return;
  }

  const bool fast = s.kernel.family() == KernelFamily::PowerTail && s.kernel.exponent() == 1.0;
  const double amp = s.kernel.amplitude();
  if (!two_d) {
    for_chunks(N, [&](Index b, Index e) {
      ArrayXd dx(N), u(N), p(N);
      for (Index i = b; i < e; ++i) {
        double S0, S1, G0, G1;
        if (fast) {
          dx = X[i] - X;
          u = (1.0 + dx * dx).rsqrt();
          blocked_sum2(s.w * u, V, S0, S1);
          p = dx * u * u * u;  // ∂₁φ = −amp · p
          blocked_sum2(s.w * p, V, G0, G1);
          Vd[i] = -kappa * amp * (V[i] * S0 - S1);
          dV1d[i] = -kappa * amp * (-dX1[i] * (V[i] * G0 - G1) + dV1[i] * S0);
        } else {
          const RowSums r = generic_row(s, X, V, i);
          Vd[i] = -kappa * (V[i] * r.s0 - r.s1);
          dV1d[i] = -kappa * (dX1[i] * (V[i] * r.g0 - r.g1) + dV1[i] * r.s0);
        }
      }
    });
    return;
  }

  const auto dX2 = y.segment(4 * N, N);
  const auto dV2 = y.segment(5 * N, N);
  auto dV2d = dy.segment(5 * N, N);
  for_chunks(N, [&](Index b, Index e) {
    ArrayXd dx(N), dyv(N), u(N), p(N), q(N);
    for (Index i = b; i < e; ++i) {
      if (fast) {
        double S0, S1, G0, G1, H0, H1;
        dx = X[i] - X;
        dyv = s.a2[i] - s.a2;
        u = (1.0 + dx * dx + dyv * dyv).rsqrt();
        blocked_sum2(s.w * u, V, S0, S1);
        const ArrayXd u3 = u * u * u;
        p = dx * u3;   // ∂₁φ = −amp p
        q = dyv * u3;  // ∂₂φ = −amp q
        blocked_sum2(s.w * p, V, G0, G1);
        blocked_sum2(s.w * q, V, H0, H1);
        Vd[i] = -kappa * amp * (V[i] * S0 - S1);
        dV1d[i] = -kappa * amp * (-dX1[i] * (V[i] * G0 - G1) + dV1[i] * S0);
        dV2d[i] = -kappa * amp *
                  (-dX2[i] * (V[i] * G0 - G1) - (V[i] * H0 - H1) + dV2[i] * S0);
      } else {
        const RowSums r = generic_row(s, X, V, i);
        Vd[i] = -kappa * (V[i] * r.s0 - r.s1);
        dV1d[i] = -kappa * (dX1[i] * (V[i] * r.g0 - r.g1) + dV1[i] * r.s0);
        dV2d[i] = -kappa * (dX2[i] * (V[i] * r.g0 - r.g1) + (V[i] * r.h0 - r.h1) +
                            dV2[i] * r.s0);
      }
    }
  });
}

void rhs_reduced(const Scenario& s, const ArrayXd& X, ArrayXd& dX) {
  const ArrayXd conv = primitive_convolve_many(
      s.kernel, s.w, X, s.dim == 2 ? s.a2 : ArrayXd(), X, s.dim == 2 ? s.a2 : ArrayXd());
  dX = s.f0_lbl - s.kappa * conv;
}

double point_set_diameter_2d(const ArrayXd& x, const ArrayXd& y) {
  const Index n = x.size();
  std::vector<std::pair<double, double>> pts(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) pts[static_cast<size_t>(i)] = {x[i], y[i]};
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() == 1) return 0.0;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull;
  hull.reserve(pts.size() + 1);
  for (int pass = 0; pass < 2; ++pass) {
    const size_t base = hull.size();
    for (const auto& p : pts) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
        hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  double d2 = 0.0;
  for (size_t i = 0; i < hull.size(); ++i)
    for (size_t j = i + 1; j < hull.size(); ++j)
      d2 = std::max(d2, sqr(hull[i].first - hull[j].first) +
                            sqr(hull[i].second - hull[j].second));
  return std::sqrt(d2);
}

Diagnostics compute_diagnostics(const Scenario& s, double t, const ArrayXd& y) {
  (void)t;
  const Index N = s.labels();
  const auto X = y.segment(0 * N, N);
  const auto V = y.segment(1 * N, N);
  const auto dX1 = y.segment(2 * N, N);
  const auto dV1 = y.segment(3 * N, N);
  Diagnostics d;
  d.amplitude = V.maxCoeff() - V.minCoeff();
  d.min_dx1 = dX1.minCoeff();
  d.momentum = blocked_sum(s.w * V);
  if (s.dim == 1) {
    d.diameter = X.maxCoeff() - X.minCoeff();
  } else {
    d.diameter = point_set_diameter_2d(X, s.a2);
  }
  const ArrayXd conv = convolve_many(s.kernel, s.w, X, s.dim == 2 ? s.a2 : ArrayXd(), X,
                                     s.dim == 2 ? s.a2 : ArrayXd());
  d.e_residual = (dV1 + s.kappa * conv * dX1 - s.e0_lbl).abs().maxCoeff();
  return d;
}

namespace {

Frame make_frame(const Scenario& s, double t, const ArrayXd& y) {
  const Index N = s.labels();
  Frame f;
  f.t = t;
  f.X = y.segment(0 * N, N);
  f.V = y.segment(1 * N, N);
  f.dX1 = y.segment(2 * N, N);
  f.dV1 = y.segment(3 * N, N);
  if (s.dim == 2) {
    f.dX2 = y.segment(4 * N, N);
    f.dV2 = y.segment(5 * N, N);
  }
  f.diag = compute_diagnostics(s, t, y);
  return f;
}

// Dormand–Prince 5(4) with FSAL.
struct Dopri5 {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class Stepper {
 public:
  Stepper(const Scenario& s) : s_(s) {}

  long evals() const { return evals_; }

  void eval(const ArrayXd& y, ArrayXd& dy) {
    rhs_full(s_, y, dy);
    ++evals_;
  }

  void rk4(ArrayXd& y, double dt) {
    eval(y, k1_);
    eval(y2_ = y + 0.5 * dt * k1_, k2_);
    eval(y2_ = y + 0.5 * dt * k2_, k3_);
    eval(y2_ = y + dt * k3_, k4_);
    y += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  // One embedded attempt; on acceptance y/t advance and k1 holds the FSAL
  // derivative. Returns the error norm.
  double dopri5_attempt(const ArrayXd& y, double dt, ArrayXd& ynew, double abs_tol,
                        double rel_tol) {
    using D = Dopri5;
    if (!fsal_valid_) {
      eval(y, k1_);
      fsal_valid_ = true;
    }
    eval(y2_ = y + dt * (D::a21 * k1_), k2_);
    eval(y2_ = y + dt * (D::a31 * k1_ + D::a32 * k2_), k3_);
    eval(y2_ = y + dt * (D::a41 * k1_ + D::a42 * k2_ + D::a43 * k3_), k4_);
    eval(y2_ = y + dt * (D::a51 * k1_ + D::a52 * k2_ + D::a53 * k3_ + D::a54 * k4_), k5_);
    eval(y2_ = y + dt * (D::a61 * k1_ + D::a62 * k2_ + D::a63 * k3_ + D::a64 * k4_ +
                         D::a65 * k5_),
         k6_);
    ynew = y + dt * (D::b1 * k1_ + D::b3 * k3_ + D::b4 * k4_ + D::b5 * k5_ + D::b6 * k6_);
    eval(ynew, k7_);
    const ArrayXd err = dt * (D::e1 * k1_ + D::e3 * k3_ + D::e4 * k4_ + D::e5 * k5_ +
                              D::e6 * k6_ + D::e7 * k7_);
    const ArrayXd scale = abs_tol + rel_tol * y.abs().max(ynew.abs());
    return std::sqrt((err / scale).square().mean());
  }

  void accept_fsal() { k1_.swap(k7_); }
  void invalidate_fsal() { fsal_valid_ = false; }

 private:
  const Scenario& s_;
  long evals_ = 0;
  bool fsal_valid_ = false;
  ArrayXd k1_, k2_, k3_, k4_, k5_, k6_, k7_, y2_;
};

}  // namespace

TrajectoryRecord integrate(const Scenario& s, const IntegratorConfig& cfg,
                           const std::vector<double>* explicit_times) {
  const Index N = s.labels();
  TrajectoryRecord rec;
  rec.method = cfg.method;
  rec.M0 = s.M0;
  rec.D0 = s.dim == 1 ? s.a1.maxCoeff() - s.a1.minCoeff()
                      : point_set_diameter_2d(s.a1, s.a2);
  rec.A0 = s.u0.maxCoeff() - s.u0.minCoeff();
  rec.fc = s.kernel.flocking_constants(rec.D0, rec.A0, s.kappa, s.M0);
  const double b = rec.fc.b;
  const double tau = cfg.record_tau > 0.0 ? cfg.record_tau : 0.25 / b;
  rec.record_tau = tau;

  ArrayXd y = initial_state(s);
  rec.frames.push_back(make_frame(s, 0.0, y));
  if (rec.A0 <= 0.0) {  // equilibrium: X(t) = X(0)
    rec.aligned = true;
    rec.stop_time = 0.0;
    return rec;
  }

  std::vector<double> targets;
  if (explicit_times) {
    targets = *explicit_times;
  } else {
    for (double t = tau; t < cfg.t_max; t *= 2.0) targets.push_back(t);
  }
  targets.push_back(cfg.t_max);

  Stepper st(s);
  double t = 0.0;
  double dt = cfg.dt > 0.0 ? cfg.dt
                           : std::min(0.01, 0.1 / (s.kappa * s.M0 * s.kernel.sup_value()));
  const bool adaptive = cfg.method == "rk45";
  double h = adaptive ? std::min(0.5 * dt, 1e-3) : dt;  // adaptive ramps up on its own
  bool stop = false;
  ArrayXd ynew;

  auto post_step = [&](double tnow) -> bool {
    if (!y.allFinite())
      throw EalignError("non-finite state at t = " + std::to_string(tnow) +
                        "; last valid frame at t = " + std::to_string(rec.frames.back().t));
    const auto V = y.segment(N, N);
    const double A = V.maxCoeff() - V.minCoeff();
    if (A <= cfg.tol_align * rec.A0) {
      rec.aligned = true;
      return true;
    }
    const double min_dx1 = y.segment(2 * N, N).minCoeff();
    if (cfg.breakdown_mode) {
      if (min_dx1 <= cfg.eps_stop) {
        rec.breakdown = true;
        return true;
      }
    } else if (min_dx1 <= 0.0) {
      // Subcritical runs keep dX1 > 0 (it may decay to 0 on the zero set);
      // an actual crossing means the data was not subcritical.
      throw EalignError("continuation criterion violated: min dX1 = " +
                        std::to_string(min_dx1) + " at t = " + std::to_string(tnow) +
                        "; data appears supercritical (use breakdown mode)");
    }
    return false;
  };

  for (double target : targets) {
    if (stop) break;
    if (target <= t + 1e-15) continue;
    while (t < target) {
      double step = std::min(adaptive ? h : dt, target - t);
      if (adaptive) {
        double err = st.dopri5_attempt(y, step, ynew, cfg.abs_tol, cfg.rel_tol);
        int rejects = 0;
        while (err > 1.0) {
          if (++rejects > 60 || step < 1e-14)
            throw EalignError("step-size underflow at t = " + std::to_string(t));
          step *= std::max(0.2, 0.9 * std::pow(err, -0.2));
          err = st.dopri5_attempt(y, step, ynew, cfg.abs_tol, cfg.rel_tol);
        }
        y.swap(ynew);
        st.accept_fsal();
        t += step;
        h = step * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
      } else {
        st.rk4(y, step);
        t += step;
      }
      if (post_step(t)) {
        stop = true;
        break;
      }
    }
    rec.frames.push_back(make_frame(s, t, y));
    if (t >= cfg.t_max) break;
    if (static_cast<int>(rec.frames.size()) >= cfg.max_frames) break;
  }
  rec.stop_time = t;
  rec.rhs_evals = st.evals();
  return rec;
}

ArrayXd integrate_reduced(const Scenario& s, double t_end, double dt) {
  ArrayXd X = s.a1;
  ArrayXd k1, k2, k3, k4, tmp;
  double t = 0.0;
  while (t < t_end - 1e-15) {
    const double step = std::min(dt, t_end - t);
    rhs_reduced(s, X, k1);
    tmp = X + 0.5 * step * k1;
    rhs_reduced(s, tmp, k2);
    tmp = X + 0.5 * step * k2;
    rhs_reduced(s, tmp, k3);
    tmp = X + step * k3;
    rhs_reduced(s, tmp, k4);
    X += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
  }
  return X;
}

}  // namespace ealign
