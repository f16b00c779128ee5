// Limit extraction: the limiting flow map X̄ via exponential tail fit, the
// Lebesgue decomposition of m̄ = X̄♯m₀, the two-sided bound verifications,
// and the 2D aggregation curves.
#pragma once

#include "ealign/common.hpp"
#include "ealign/dynamics.hpp"
#include "ealign/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ealign {

struct BoundCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;   // most negative slack margin observed
  Index violations = 0;
  Index checked = 0;
  std::string detail;
};

struct CurveSample {
  double a2 = 0.0;
  double fhat = 0.0;        // collapsed image position of the Z-slice
  double weight = 0.0;      // c(α₋) = ∫ ρ₀ over the slice interval
  double lo = 0.0, hi = 0.0;
  double image_diam = 0.0;  // collapse diagnostic
};

struct CurveBranch {
  std::vector<CurveSample> samples;
};

struct LimitOptions {
  ZeroSetOptions zero_set;
  double atom_mass_tol_frac = 1e-8;  // × M₀: smaller Z-interval masses stay AC
  double collapse_tol = 0.0;         // 0 → max(1e-6, 2 · extrapolation bound)
};

struct LimitReport {
  ArrayXd xbar, dx1bar;
  double extrap_error_bound = 0.0;  // A(T)/b
  double fitted_rate = 0.0;
  bool tail_fit_ok = false;
  bool warning_fallback = false;

  ZeroSet zs;
  std::vector<char> on_z;  // per dynamic label: rides in the singular part
  ArrayXd rho_bar;         // ρ̄∘X̄ on AC labels off Z; NaN elsewhere
  std::vector<Atom> singular_atoms;  // collapse atoms and pushed-forward ν atoms
  double ac_mass = 0.0, singular_mass = 0.0;
  double collapse_tol = 0.0;

  std::vector<CurveBranch> curves;  // n = 2
  std::vector<BoundCheck> checks;

  double kappa = 0.0, M0 = 0.0, phi_sup = 0.0, phi_floor = 0.0;

  bool all_checks_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// X̄ᵢ = Xᵢ(T) + Vᵢ(T)/ĉ with ĉ from a log-linear fit of A(t) over the last
// three recorded frames; falls back to X̄ = X(T) (warning flag) when the tail
// is non-monotone. Requires an aligned run.
LimitReport limit_flow_map(const Scenario& s, const TrajectoryRecord& rec);

// Lebesgue decomposition of m̄: fills zs, on_z, rho_bar, atoms and the mass
// bookkeeping. Throws when a Z-interval image has not collapsed within
// tolerance (extend the run).
void limit_measure(LimitReport& lr, const Scenario& s, const LimitOptions& opt = {});

// Proposition 1.1 / Eq. (1.11) bracket on random same-slice label pairs.
BoundCheck check_separation_bounds(LimitReport& lr, const Scenario& s, Index n_pairs,
                                   std::uint64_t seed, double rel_slack = 1e-3);

// Proposition 3.2 / Corollary 3.3: measure of X̄(E) for an interval union E
// within one slice, with its two-sided e₀-integral bracket.
struct ImageBounds {
  double lower = 0.0, measured = 0.0, upper = 0.0;
};
ImageBounds measure_image_bounds(const LimitReport& lr, const Scenario& s,
                                 const std::vector<std::pair<double, double>>& E,
                                 Index slice_index = 0);

// Eq. (1.15) two-sided density bound on P_ε labels (ε = eps_p_frac · max e₀).
BoundCheck check_density_bounds(LimitReport& lr, const Scenario& s,
                                double eps_p_frac = 1e-3, double rel_slack = 1e-3);

// Theorem 1.4 aggregation curves (n = 2): collapses Z-slices into per-branch
// samples (α₋, f̂, c); maximal x₁-convex components split/merge by overlap.
void aggregation_curves(LimitReport& lr, const Scenario& s);

// Pushed-forward decomposition as a 1D weighted cloud (AC labels + atoms).
struct Decomp1D {
  ArrayXd x, w;
  std::vector<Atom> atoms;
  double total = 0.0;
};
Decomp1D decomposition_1d(const LimitReport& lr, const Scenario& s);

// m̄((x−r, x+r)) from the decomposition.
double ball_mass(const Decomp1D& d, double x, double r);

// Piecewise-linear interpolation of X̄ within a slice.
double xbar_at(const LimitReport& lr, const Scenario& s, double a1, Index slice_index = 0);

}  // namespace ealign
