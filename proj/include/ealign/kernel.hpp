// Radially decreasing communication kernels: evaluation, the signed partial
// primitive used by the reduced trajectory equation, radial integrals, and
// the flocking constants (a-priori diameter bound, kernel floor).
#pragma once

#include "ealign/common.hpp"

#include <optional>

namespace ealign {

enum class KernelFamily { Constant, PowerTail, Tabulated };

// Constants governing flocking and exponential alignment: D̄ is the a-priori
// diameter bound, the kernel floor is φ(D̄), and (a, b) drive the deformation
// envelope.
struct FlockingConstants {
  double diam_bound = 0.0;    // D̄
  double kernel_floor = 0.0;  // φ(D̄)
  double a = 0.0;             // κ M₀ ‖∇φ‖∞ A(0)
  double b = 0.0;             // κ M₀ φ(D̄)
};

class Kernel {
 public:
  static Kernel constant(double amplitude, int dimension = 1);
  // φ(r) = scale (1 + r²)^{-s/2}; heavy-tailed iff s ≤ 1.
  static Kernel power_tail(double s, double scale = 1.0, int dimension = 1);
  // Monotone-cubic radial interpolant through (r, φ) samples; the declared
  // heavy-tail flag is verified against the extrapolated log-log tail slope.
  static Kernel tabulated(ArrayXd r, ArrayXd phi, bool declared_heavy_tailed,
                          int dimension = 1);

  KernelFamily family() const { return family_; }
  int dimension() const { return dim_; }
  double sup_value() const { return sup_; }      // ‖φ‖∞ = φ(0)
  double grad_sup() const { return grad_sup_; }  // ‖∇φ‖∞
  bool heavy_tailed() const { return heavy_; }
  double amplitude() const { return amp_; }
  double exponent() const { return s_; }

  // Radial profile φ(r), r ≥ 0, and its derivative dφ/dr (≤ 0).
  double radial(double r) const;
  double radial_deriv(double r) const;
  // φ(|x|) at a point (x₁, x₋); x₋ ignored in n = 1.
  double eval(double x1, double x2 = 0.0) const;

  // Signed partial primitive ϕ(x₁, x₋) = ∫₀^{x₁} φ(y, x₋) dy; odd in x₁.
  // Closed form for Constant and PowerTail s ∈ {1,2,3}; adaptive quadrature
  // (rel tol 1e-10) otherwise. Throws on quadrature non-convergence.
  double primitive(double x1, double x2 = 0.0) const;

  // ∂/∂x₋ of the primitive (n = 2 only; closed form for s = 1).
  double primitive_dlat(double x1, double x2) const;

  // ∫_{r0}^{r1} φ(r) dr along the radial profile.
  double radial_integral(double r0, double r1) const;

  // Solves κ M₀ ∫_{D0}^{D̄} φ = A0 for D̄ (bisection, abs tol 1e-12) and
  // assembles (φ̲, a, b). Requires a heavy tail; throws otherwise.
  FlockingConstants flocking_constants(double D0, double A0, double kappa,
                                       double M0) const;

  const ArrayXd& tab_r() const { return tab_r_; }
  const ArrayXd& tab_phi() const { return tab_phi_; }

 private:
  Kernel() = default;
  void validate() const;

  KernelFamily family_ = KernelFamily::Constant;
  int dim_ = 1;
  double amp_ = 1.0;   // Constant amplitude / PowerTail scale
  double s_ = 1.0;     // PowerTail exponent
  double sup_ = 1.0;
  double grad_sup_ = 0.0;
  bool heavy_ = true;
  double tail_slope_ = 0.0;  // fitted log-log tail slope (Tabulated)
  ArrayXd tab_r_, tab_phi_, tab_d_;  // Fritsch–Carlson slopes in tab_d_
};

}  // namespace ealign
