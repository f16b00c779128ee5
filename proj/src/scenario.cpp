#include "ealign/scenario.hpp"

#include "ealign/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

double Scenario::conv0(double x1, double x2) const {
  const Index n = labels();
  if (kernel.family() == KernelFamily::Constant) return kernel.sup_value() * M0;
  if (kernel.family() == KernelFamily::PowerTail && kernel.exponent() == 1.0) {
    if (dim == 1) {
      const ArrayXd d = x1 - a1;
      return kernel.amplitude() * blocked_sum(w * (1.0 + d * d).rsqrt());
    }
    const ArrayXd d1 = x1 - a1, d2 = x2 - a2;
    return kernel.amplitude() * blocked_sum(w * (1.0 + d1 * d1 + d2 * d2).rsqrt());
  }
  ArrayXd vals(n);
  for (Index i = 0; i < n; ++i)
    vals[i] = kernel.eval(x1 - a1[i], dim == 2 ? x2 - a2[i] : 0.0);
  return blocked_sum(w * vals);
}

double entropy_e0(const Scenario& s, double a1, double a2) { return s.e0_fn(a1, a2); }

double f0(const Scenario& s, double a1, double a2) {
  const Index n = s.labels();
  double conv = 0.0;
  if (s.kernel.family() == KernelFamily::PowerTail && s.kernel.exponent() == 1.0 &&
      n > 512) {
    if (s.dim == 1) {
      const ArrayXd d = a1 - s.a1;
      conv = s.kernel.amplitude() * blocked_sum(s.w * (d + (1.0 + d * d).sqrt()).log());
    } else {
      const ArrayXd d1 = a1 - s.a1;
      const ArrayXd inv = (1.0 + (a2 - s.a2).square()).rsqrt();
      const ArrayXd z = d1 * inv;
      conv = s.kernel.amplitude() * blocked_sum(s.w * (z + (1.0 + z * z).sqrt()).log());
    }
  } else {
    ArrayXd vals(n);
    for (Index i = 0; i < n; ++i)
      vals[i] = s.kernel.primitive(a1 - s.a1[i], s.dim == 2 ? a2 - s.a2[i] : 0.0);
    conv = blocked_sum(s.w * vals);
  }
  return s.u0_fn(a1, a2) + s.kappa * conv;
}

namespace {

// f ≤ 0 at x_in and f > 0 at x_out; returns the crossing between them.
double bisect_crossing(const std::function<double(double)>& f, double x_in,
                       double x_out, double tol) {
  for (int it = 0; it < 200 && std::abs(x_out - x_in) > tol; ++it) {
    const double mid = 0.5 * (x_in + x_out);
    (f(mid) <= 0.0 ? x_in : x_out) = mid;
  }
  return 0.5 * (x_in + x_out);
}

}  // namespace

bool ZeroSet::any_nondegenerate() const {
  for (const auto& sl : slices)
    for (const auto& zi : sl.z)
      if (!zi.degenerate) return true;
  return false;
}

ZeroSet zero_set(const Scenario& s, const ZeroSetOptions& opt) {
  ZeroSet out;
  out.eps_z = opt.eps_z >= 0.0 ? opt.eps_z
                               : 1e-10 * s.kappa * s.M0 * s.kernel.sup_value();
  out.degenerate_length =
      opt.degenerate_length >= 0.0 ? opt.degenerate_length : 1e-4 * s.omega.length(0);
  const double eps = out.eps_z;

  for (const Scenario::Slice& sl : s.slices) {
    ZeroSlice zs;
    zs.a2_value = sl.a2_value;
    zs.slice_index = static_cast<Index>(&sl - s.slices.data());
    const double a2 = sl.a2_value;
    auto e = [&](double x) { return s.e0_fn(x, a2); };

    // Scan nodes: slice labels plus the Ω-slice endpoints.
    std::vector<double> nodes;
    nodes.reserve(static_cast<size_t>(sl.end - sl.begin) + 2);
    nodes.push_back(s.omega.lo[0]);
    for (Index i = sl.begin; i < sl.end; ++i) nodes.push_back(s.a1[i]);
    nodes.push_back(s.omega.hi[0]);

    std::vector<double> ev(nodes.size());
    double min_e = std::numeric_limits<double>::infinity();
    size_t min_at = 0;
    for (size_t k = 0; k < nodes.size(); ++k) {
      ev[k] = e(nodes[k]);
      if (ev[k] < min_e) {
        min_e = ev[k];
        min_at = k;
      }
    }
    if (min_e < -eps) {
      // Supercritical: locate the maximal e₀ < −ε interval around the minimum
      // and report the crossing-time bound (β−α)/|∫ e₀|.
      size_t lo_k = min_at, hi_k = min_at;
      while (lo_k > 0 && ev[lo_k - 1] < -eps) --lo_k;
      while (hi_k + 1 < nodes.size() && ev[hi_k + 1] < -eps) ++hi_k;
      auto g = [&](double x) { return e(x) + eps; };
      double lo = nodes[lo_k], hi = nodes[hi_k];
      if (lo_k > 0) lo = bisect_crossing(g, nodes[lo_k], nodes[lo_k - 1], opt.refine_tol);
      if (hi_k + 1 < nodes.size())
        hi = bisect_crossing(g, nodes[hi_k], nodes[hi_k + 1], opt.refine_tol);
      if (hi < lo) std::swap(lo, hi);
      const double mass_e0 = s.e0_int ? s.e0_int(lo, hi, a2) : min_e * (hi - lo);
      const double bound =
          mass_e0 < 0.0 ? (hi - lo) / std::abs(mass_e0)
                        : std::numeric_limits<double>::infinity();
      throw SupercriticalError(
          "supercritical data: e0 = " + std::to_string(min_e) + " at alpha1 = " +
              std::to_string(nodes[min_at]) +
              (s.dim == 2 ? " (slice a2 = " + std::to_string(a2) + ")" : "") +
              "; trajectories cross by t <= " + std::to_string(bound),
          nodes[min_at], min_e, bound);
    }

    // Group consecutive below-threshold nodes into intervals.
    size_t k = 0;
    while (k < nodes.size()) {
      if (ev[k] > eps) {
        ++k;
        continue;
      }
      size_t k_end = k;
      while (k_end + 1 < nodes.size() && ev[k_end + 1] <= eps) ++k_end;
      ZInterval zi;
      zi.lo = nodes[k];
      zi.hi = nodes[k_end];
      auto g = [&](double x) { return e(x) - eps; };
      if (k > 0) zi.lo = bisect_crossing(g, nodes[k], nodes[k - 1], opt.refine_tol);
      if (k_end + 1 < nodes.size())
        zi.hi = bisect_crossing(g, nodes[k_end], nodes[k_end + 1], opt.refine_tol);
      if (zi.hi < zi.lo) std::swap(zi.lo, zi.hi);
      zi.degenerate = (zi.hi - zi.lo) <= out.degenerate_length;

      // m₀-mass riding on the interval; boundary atoms count toward Z.
      double mass = 0.0;
      for (Index i = sl.begin; i < sl.end; ++i)
        if (s.a1[i] >= zi.lo && s.a1[i] <= zi.hi) mass += s.w[i];
      const double btol = 1e-12 * (1.0 + s.omega.length(0));
      for (Index i = s.n_ac; i < s.labels(); ++i) {
        const bool same_slice =
            s.dim == 1 || std::abs(s.a2[i] - a2) <= 0.5 * s.m0.h2 + btol;
        if (same_slice && s.a1[i] >= zi.lo - btol && s.a1[i] <= zi.hi + btol)
          mass += s.w[i];
      }
      zi.mass = mass;
      zs.z.push_back(zi);
      k = k_end + 1;
    }

    // Complement intervals (the positivity set within the slice).
    double cursor = s.omega.lo[0];
    for (const ZInterval& zi : zs.z) {
      if (zi.lo > cursor) zs.p.emplace_back(cursor, zi.lo);
      cursor = std::max(cursor, zi.hi);
    }
    if (cursor < s.omega.hi[0]) zs.p.emplace_back(cursor, s.omega.hi[0]);
    out.slices.push_back(std::move(zs));
  }
  return out;
}

}  // namespace ealign
