// Lagrangian integration of the unidirectional alignment system: the full
// (X, V) system with deformation entries, the reduced scalar equation for X,
// flocking diagnostics, and the trajectory record consumed by the limit
// extraction.
#pragma once

#include "ealign/common.hpp"
#include "ealign/scenario.hpp"

#include <string>
#include <vector>

namespace ealign {

struct IntegratorConfig {
  std::string method = "rk45";  // "rk4" | "rk45"
  double dt = 0.0;              // rk4 step; 0 → min(0.01, 0.1/(κ M₀ ‖φ‖∞))
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double t_max = 200.0;
  double tol_align = 1e-8;      // stop when A(t) ≤ tol_align · A(0)
  double record_tau = 0.0;      // 0 → 0.25 / b ; schedule t = 0, τ, 2τ, 4τ, …
  double eps_stop = 1e-6;       // breakdown guard on min ∂₁X
  bool breakdown_mode = false;
  int max_frames = 64;
};

struct Diagnostics {
  double diameter = 0.0;    // D(t), flock diameter
  double amplitude = 0.0;   // A(t) = max |Vᵢ − Vⱼ|
  double min_dx1 = 0.0;
  double e_residual = 0.0;  // max |dV1 + κ(φ∗m_t)(X)·dX1 − e₀|
  double momentum = 0.0;    // Σ wᵢ Vᵢ
};

struct Frame {
  double t = 0.0;
  ArrayXd X, V, dX1, dV1, dX2, dV2;  // dX2/dV2 empty in n = 1
  Diagnostics diag;
};

struct TrajectoryRecord {
  std::vector<Frame> frames;
  FlockingConstants fc;
  double A0 = 0.0, D0 = 0.0, M0 = 0.0;
  double record_tau = 0.0;
  bool aligned = false;
  bool breakdown = false;
  double stop_time = 0.0;
  long rhs_evals = 0;
  std::string method;

  const Frame& last() const { return frames.back(); }
};

// Pure RHS evaluations (spec operations; also used by the integrator).
// State layout: [X, V, dX1, dV1] for n = 1, plus [dX2, dV2] for n = 2.
void rhs_full(const Scenario& s, const ArrayXd& y, ArrayXd& dy);
int state_components(const Scenario& s);
ArrayXd initial_state(const Scenario& s);

// Reduced scalar equation (2.4): Ẋᵢ = f₀(αᵢ) − κ Σⱼ wⱼ ϕ(Xᵢ−Xⱼ, α₋ᵢ−α₋ⱼ).
void rhs_reduced(const Scenario& s, const ArrayXd& X, ArrayXd& dX);

// Integrates to alignment (A ≤ tol·A0), t_max, or breakdown; records frames
// on the geometric schedule plus the stopping time. `explicit_times`, when
// given, replaces the geometric schedule (used for paired stability runs).
TrajectoryRecord integrate(const Scenario& s, const IntegratorConfig& cfg,
                           const std::vector<double>* explicit_times = nullptr);

// Fixed-step RK4 on the reduced equation; returns X(t_end).
ArrayXd integrate_reduced(const Scenario& s, double t_end, double dt);

// Exact diameter of a planar point set (convex hull + pairwise scan).
double point_set_diameter_2d(const ArrayXd& x, const ArrayXd& y);

Diagnostics compute_diagnostics(const Scenario& s, double t, const ArrayXd& y);

}  // namespace ealign
