// Initial data for the unidirectional alignment dynamics: (u₀, m₀, κ, Ω),
// the entropy e₀ = ∂₁u₀ + κ φ∗m₀ and its antiderivative f₀, zero-set
// detection, and the named example builders.
//
// Note on κ: e₀ carries the κ factor on the convolution term so that
// e₀ = ∂_{α₁} f₀ holds exactly for f₀ = u₀ + κ ∫ϕ(α−γ)dm₀(γ); this is the
// convention used by every bound check and echoed into reports.
#pragma once

#include "ealign/common.hpp"
#include "ealign/expression.hpp"
#include "ealign/kernel.hpp"
#include "ealign/measure.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ealign {

class SupercriticalError : public EalignError {
 public:
  SupercriticalError(const std::string& msg, double location, double min_e0,
                     double crossing_time_bound)
      : EalignError(msg),
        location(location),
        min_e0(min_e0),
        crossing_time_bound(crossing_time_bound) {}
  double location;
  double min_e0;
  double crossing_time_bound;  // (β−α)/|∫ e₀| over the negative interval
};

struct CantorConstruction {
  double gamma = 0.0, beta = 0.0;
  int depth = 0;
  double c0 = 0.0;            // ∫ g
  double c1 = 0.0;            // c₀ βγ / (1 − 2βγ)
  double predicted_dim = 0.0; // ln 2 / (−ln βγ)
  struct Gap {
    double center, half_width, amplitude;  // removed interval, bump scale β^j
    int level;
  };
  std::vector<Gap> gaps;                                // sorted by center
  std::vector<std::pair<double, double>> level_J;       // surviving intervals I_J^k
  double truncation_factor = 0.0;                       // (2βγ)^{J−j} tail bound base
};

struct Scenario {
  std::string name;
  Kernel kernel = Kernel::constant(1.0);
  double kappa = 1.0;
  Box omega;
  int dim = 1;
  int smoothness_k = 1;

  MassMeasure m0;
  double M0 = 0.0;

  // Dynamic label arrays: the lumped AC labels followed by the atoms of m₀
  // (atoms are particles of the Lagrangian system like any label).
  ArrayXd a1, a2, w, rho0;
  Index n_ac = 0;  // first n_ac entries are AC labels, the rest atoms
  ArrayXd u0, du0_1, du0_2, e0_lbl, f0_lbl;

  // Per-slice contiguous label ranges (n = 2); one slice in n = 1.
  struct Slice {
    double a2_value;
    Index begin, end;  // [begin, end) into the label arrays, sorted by a1
  };
  std::vector<Slice> slices;

  // Analytic fields. e0_int integrates e₀ along a slice: (a, b, a2) → ∫_a^b.
  std::function<double(double, double)> e0_fn;
  std::function<double(double, double, double)> e0_int;
  std::function<double(double, double)> rho0_fn;
  std::function<double(double, double)> u0_fn;

  // Closed-form limiting map when available (constant kernel).
  std::function<double(double)> xbar_exact;
  std::optional<CantorConstruction> cantor;
  double predicted_local_dim = std::numeric_limits<double>::quiet_NaN();

  Index labels() const { return a1.size(); }
  double u0_sup() const { return labels() ? u0.abs().maxCoeff() : 0.0; }
  // (φ∗m₀)(α) with labels at rest.
  double conv0(double x1, double x2 = 0.0) const;
};

// --- spec operations -------------------------------------------------------

// e₀(α) = ∂₁u₀(α) + κ (φ∗m₀)(α).
double entropy_e0(const Scenario& s, double a1, double a2 = 0.0);

// f₀(α) = u₀(α) + κ ∫ ϕ(α−γ) dm₀(γ); satisfies ∂₁f₀ = e₀.
double f0(const Scenario& s, double a1, double a2 = 0.0);

struct ZInterval {
  double lo = 0.0, hi = 0.0;
  double mass = 0.0;      // m₀-mass carried by the interval (labels + atoms)
  bool degenerate = false;
};

struct ZeroSlice {
  double a2_value = 0.0;
  Index slice_index = 0;
  std::vector<ZInterval> z;
  std::vector<std::pair<double, double>> p;  // complement within the Ω-slice
};

struct ZeroSet {
  double eps_z = 0.0;
  double degenerate_length = 0.0;
  std::vector<ZeroSlice> slices;
  bool any_nondegenerate() const;
};

struct ZeroSetOptions {
  double eps_z = -1.0;              // <0 → 1e-10 κ M₀ ‖φ‖∞
  double degenerate_length = -1.0;  // <0 → 1e-4 · |Ω slice|
  double refine_tol = 1e-10;
};

// Maximal {e₀ ≤ ε_z} intervals per slice, grid-seeded at the labels with
// endpoints refined by bisection. Throws SupercriticalError if e₀ < −ε_z.
ZeroSet zero_set(const Scenario& s, const ZeroSetOptions& opt = {});

// --- named builders ---------------------------------------------------------

struct OracleParams {
  Index n_labels = 256;
  double kappa = 1.0;
  double amplitude = 1.0;     // constant kernel value
  double u0_scale = 1.0;      // u₀ = −scale · sin(πα)/π on Ω = [−1,1]
  double perturb_eps = 0.0;   // u₀ += ε cos(πα)  (stability pairs)
};
Scenario oracle_scenario(const OracleParams& p = {});

struct CantorParams {
  double gamma = 0.3;   // removed-length ratio, in (0, 1/3)
  double beta = 0.3;    // amplitude ratio, in (0, 1)
  int depth = 8;        // truncation level J
  Index n_labels = 1 << 14;
  double kappa = 1.0;
  double bump_scale = 1.0;  // multiplies the unit-height default bump
};
Scenario cantor_scenario(const CantorParams& p = {});

struct PowerlawParams {
  double p = 2.0;     // > 1
  double delta = 1.0; // radius on which e₀ = p|α|^{p−1} is certified
  Index n_labels = 4096;
  double kappa = 1.0;
};
Scenario powerlaw_scenario(const PowerlawParams& p = {});

struct WaveParams {  // generic strictly subcritical 1D scenario, Z = ∅
  Index n_labels = 256;
  double kappa = 1.0;
  double u0_scale = 0.3;  // < min of κ φ∗m₀ keeps e₀ > 0; > ~1 goes supercritical
  bool allow_supercritical = false;
};
Scenario wave_scenario(const WaveParams& p = {});

struct PlateauParams {  // one exact Z-interval [−z, z]; ρ₀ vanishes near ∂Z
  Index n_labels = 2048;
  double kappa = 1.0;
  double z_half_width = 0.3;
  double z_mass = 0.3;  // ρ₀-mass carried inside Z
};
Scenario plateau_scenario(const PlateauParams& p = {});

struct Disk2DParams {
  Index n_axis = 128;
  double kappa = 1.0;
  double radius = 0.25;  // Z = {|α| ≤ R}, Ω = [−1/2,1/2]²
};
Scenario disk_scenario(const Disk2DParams& p = {});

struct Annulus2DParams {
  Index n_axis = 128;
  double kappa = 1.0;
  double r_inner = 0.15, r_outer = 0.35;
};
Scenario annulus_scenario(const Annulus2DParams& p = {});

struct CustomParams {
  std::string u0_expr = "0";
  std::string rho0_expr = "1";
  Box omega = Box::interval(-1.0, 1.0);
  Index n_labels = 256;   // per axis
  double kappa = 1.0;
  Kernel kernel = Kernel::power_tail(1.0);
  std::vector<Atom> atoms;
  bool normalize_mass = false;
  bool allow_supercritical = false;
  int smoothness_k = 1;
};
Scenario custom_scenario(const CustomParams& p);

}  // namespace ealign
