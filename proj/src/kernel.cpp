#include "ealign/kernel.hpp"

#include "ealign/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

namespace {

// max_r |φ'(r)| for φ(r) = scale (1+r²)^{-s/2}, attained at r = 1/√(s+1).
double power_tail_grad_sup(double s, double scale) {
  if (s <= 0.0) return 0.0;
  const double r = 1.0 / std::sqrt(s + 1.0);
  return scale * s * r * std::pow(1.0 + r * r, -0.5 * (s + 2.0));
}

// Fritsch–Carlson monotone cubic slopes for nonincreasing data.
ArrayXd monotone_slopes(const ArrayXd& x, const ArrayXd& y) {
  const Index n = x.size();
  ArrayXd d(n), delta(n - 1);
  for (Index i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (Index i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0)
      d[i] = 0.0;
    else {
      const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // clamp to preserve monotonicity
  for (Index i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d[i] = d[i + 1] = 0.0;
    } else {
      const double a = d[i] / delta[i], b = d[i + 1] / delta[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        d[i] = tau * a * delta[i];
        d[i + 1] = tau * b * delta[i];
      }
    }
  }
  return d;
}

double hermite_eval(double x, double x0, double x1, double y0, double y1, double d0,
                    double d1) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) +
         y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
}

}  // namespace

Kernel Kernel::constant(double amplitude, int dimension) {
  Kernel k;
  k.family_ = KernelFamily::Constant;
  k.dim_ = dimension;
  k.amp_ = amplitude;
  k.sup_ = amplitude;
  k.grad_sup_ = 0.0;
  k.heavy_ = true;
  k.validate();
  return k;
}

Kernel Kernel::power_tail(double s, double scale, int dimension) {
  Kernel k;
  k.family_ = KernelFamily::PowerTail;
  k.dim_ = dimension;
  k.amp_ = scale;
  k.s_ = s;
  k.sup_ = scale;
  k.grad_sup_ = power_tail_grad_sup(s, scale);
  k.heavy_ = (s <= 1.0);
  k.validate();
  return k;
}

Kernel Kernel::tabulated(ArrayXd r, ArrayXd phi, bool declared_heavy_tailed,
                         int dimension) {
  if (r.size() < 4 || r.size() != phi.size())
    throw EalignError("tabulated kernel needs >= 4 radial samples");
  if (r[0] != 0.0) throw EalignError("tabulated kernel samples must start at r = 0");
  for (Index i = 0; i + 1 < r.size(); ++i) {
    if (!(r[i + 1] > r[i])) throw EalignError("tabulated kernel radii must increase");
    if (phi[i + 1] > phi[i] + 1e-15 * phi[0])
      throw EalignError("tabulated kernel must be radially nonincreasing");
  }
  if ((phi < 0.0).any()) throw EalignError("kernel values must be nonnegative");
  Kernel k;
  k.family_ = KernelFamily::Tabulated;
  k.dim_ = dimension;
  k.tab_r_ = std::move(r);
  k.tab_phi_ = std::move(phi);
  k.tab_d_ = monotone_slopes(k.tab_r_, k.tab_phi_);
  k.sup_ = k.tab_phi_[0];
  k.amp_ = k.sup_;
  k.grad_sup_ = k.tab_d_.abs().maxCoeff();
  // Tail check: log-log slope over the last three samples; the extrapolated
  // power tail r^{-slope} has a divergent radial integral iff slope <= 1.
  const Index n = k.tab_r_.size();
  double slope = 2.0;
  if (k.tab_phi_[n - 1] > 0.0 && k.tab_phi_[n - 3] > 0.0 && k.tab_r_[n - 3] > 0.0) {
    slope = std::log(k.tab_phi_[n - 3] / k.tab_phi_[n - 1]) /
            std::log(k.tab_r_[n - 1] / k.tab_r_[n - 3]);
  }
  k.tail_slope_ = slope;
  const bool tail_heavy = slope <= 1.0 + 1e-9 && k.tab_phi_[n - 1] > 0.0;
  if (declared_heavy_tailed != tail_heavy)
    throw EalignError("tabulated kernel heavy-tail declaration (" +
                      std::string(declared_heavy_tailed ? "true" : "false") +
                      ") contradicts extrapolated tail slope " + std::to_string(slope));
  k.heavy_ = declared_heavy_tailed;
  k.validate();
  return k;
}

void Kernel::validate() const {
  if (dim_ < 1 || dim_ > 2) throw EalignError("kernel dimension must be 1 or 2");
  if (amp_ < 0.0 || sup_ < 0.0) throw EalignError("kernel must be nonnegative");
  if (!std::isfinite(grad_sup_)) throw EalignError("kernel gradient bound must be finite");
  if (family_ == KernelFamily::PowerTail && s_ < 0.0)
    throw EalignError("power-tail exponent must be nonnegative");
}

double Kernel::radial(double r) const {
  r = std::abs(r);
  switch (family_) {
    case KernelFamily::Constant:
      return amp_;
    case KernelFamily::PowerTail:
      return amp_ * std::pow(1.0 + r * r, -0.5 * s_);
    case KernelFamily::Tabulated: {
      const Index n = tab_r_.size();
      if (r >= tab_r_[n - 1]) {
        const double phi_end = tab_phi_[n - 1];
        if (phi_end <= 0.0) return 0.0;
        return phi_end * std::pow(r / tab_r_[n - 1], -tail_slope_);
      }
      const double* begin = tab_r_.data();
      const Index i = std::upper_bound(begin, begin + n, r) - begin - 1;
      const Index j = std::clamp<Index>(i, 0, n - 2);
      return hermite_eval(r, tab_r_[j], tab_r_[j + 1], tab_phi_[j], tab_phi_[j + 1],
                          tab_d_[j], tab_d_[j + 1]);
    }
  }
  return 0.0;
}

double Kernel::radial_deriv(double r) const {
  r = std::abs(r);
  switch (family_) {
    case KernelFamily::Constant:
      return 0.0;
    case KernelFamily::PowerTail:
      return -amp_ * s_ * r * std::pow(1.0 + r * r, -0.5 * (s_ + 2.0));
    case KernelFamily::Tabulated: {
      const Index n = tab_r_.size();
      if (r >= tab_r_[n - 1]) {
        const double phi_end = tab_phi_[n - 1];
        if (phi_end <= 0.0) return 0.0;
        return -tail_slope_ * phi_end / tab_r_[n - 1] *
               std::pow(r / tab_r_[n - 1], -tail_slope_ - 1.0);
      }
      const double* begin = tab_r_.data();
      const Index i = std::upper_bound(begin, begin + n, r) - begin - 1;
      const Index j = std::clamp<Index>(i, 0, n - 2);
      // derivative of the cubic Hermite segment
      const double h = tab_r_[j + 1] - tab_r_[j], t = (r - tab_r_[j]) / h;
      const double t2 = t * t;
      return (tab_phi_[j] * (6 * t2 - 6 * t) + h * tab_d_[j] * (3 * t2 - 4 * t + 1) +
              tab_phi_[j + 1] * (6 * t - 6 * t2) + h * tab_d_[j + 1] * (3 * t2 - 2 * t)) /
             h;
    }
  }
  return 0.0;
}

double Kernel::eval(double x1, double x2) const {
  return radial(dim_ == 1 ? std::abs(x1) : std::hypot(x1, x2));
}

double Kernel::primitive(double x1, double x2) const {
  const double c2 = dim_ == 1 ? 0.0 : x2 * x2;
  switch (family_) {
    case KernelFamily::Constant:
      return amp_ * x1;
    case KernelFamily::PowerTail: {
      const double a2 = 1.0 + c2;
      if (s_ == 1.0) return amp_ * std::asinh(x1 / std::sqrt(a2));
      if (s_ == 2.0) return amp_ / std::sqrt(a2) * std::atan(x1 / std::sqrt(a2));
      if (s_ == 3.0) return amp_ * x1 / (a2 * std::sqrt(a2 + x1 * x1));
      break;
    }
    case KernelFamily::Tabulated:
      break;
  }
  const double sign_x = sign(x1);
  const double v = integrate([&](double y) { return radial(std::sqrt(y * y + c2)); }, 0.0,
                             std::abs(x1), 1e-10, 1e-15);
  return sign_x * v;
}

double Kernel::primitive_dlat(double x1, double x2) const {
  if (dim_ != 2) return 0.0;
  if (family_ == KernelFamily::Constant) return 0.0;
  if (family_ == KernelFamily::PowerTail && s_ == 1.0) {
    const double a2 = 1.0 + x2 * x2;
    return -amp_ * x2 * x1 / (a2 * std::sqrt(a2 + x1 * x1));
  }
  // d/dc ∫₀^{x₁} φ(√(y²+c²)) dy by quadrature of the differentiated integrand
  // is not needed for shipped kernels; central differences suffice here.
  const double h = 1e-6 * (1.0 + std::abs(x2));
  return (primitive(x1, x2 + h) - primitive(x1, x2 - h)) / (2.0 * h);
}

double Kernel::radial_integral(double r0, double r1) const {
  switch (family_) {
    case KernelFamily::Constant:
      return amp_ * (r1 - r0);
    case KernelFamily::PowerTail:
      if (s_ == 1.0) return amp_ * (std::asinh(r1) - std::asinh(r0));
      if (s_ == 2.0) return amp_ * (std::atan(r1) - std::atan(r0));
      break;
    case KernelFamily::Tabulated:
      break;
  }
  return integrate([&](double r) { return radial(r); }, r0, r1, 1e-12, 1e-15);
}

FlockingConstants Kernel::flocking_constants(double D0, double A0, double kappa,
                                             double M0) const {
  if (!heavy_)
    throw EalignError("no a-priori diameter bound: kernel is not heavy-tailed");
  if (D0 < 0.0 || A0 < 0.0 || kappa <= 0.0 || M0 <= 0.0)
    throw EalignError("flocking_constants requires D0, A0 >= 0 and kappa, M0 > 0");
  FlockingConstants fc;
  const double target = A0 / (kappa * M0);
  if (target == 0.0) {
    fc.diam_bound = D0;
  } else if (family_ == KernelFamily::Constant) {
    fc.diam_bound = D0 + target / amp_;
  } else {
    double lo = D0, hi = std::max(2.0 * D0, 1.0);
    while (radial_integral(D0, hi) < target) {
      hi *= 2.0;
      if (hi > 1e12) throw EalignError("diameter-bound bracket exceeded 1e12");
    }
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (radial_integral(D0, mid) < target ? lo : hi) = mid;
    }
    fc.diam_bound = 0.5 * (lo + hi);
  }
  fc.kernel_floor = radial(fc.diam_bound);
  fc.a = kappa * M0 * grad_sup_ * A0;
  fc.b = kappa * M0 * fc.kernel_floor;
  return fc;
}

}  // namespace ealign
