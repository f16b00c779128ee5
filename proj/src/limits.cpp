#include "ealign/limits.hpp"

#include "ealign/fit.hpp"
#include "ealign/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace ealign {

namespace {

std::string short_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double interp_sorted(const ArrayXd& xs, const ArrayXd& ys, Index begin, Index end,
                     double x) {
  // xs[begin:end) ascending; linear interpolation, clamped at the ends.
  if (end - begin == 1) return ys[begin];
  const double* lo = xs.data() + begin;
  const double* hi = xs.data() + end;
  const double* it = std::upper_bound(lo, hi, x);
  Index j = it - xs.data();
  j = std::clamp<Index>(j, begin + 1, end - 1);
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + std::clamp(t, 0.0, 1.0) * (ys[j] - ys[j - 1]);
}

}  // namespace

double xbar_at(const LimitReport& lr, const Scenario& s, double a1, Index slice_index) {
  const auto& sl = s.slices.at(static_cast<size_t>(slice_index));
  return interp_sorted(s.a1, lr.xbar, sl.begin, sl.end, a1);
}

LimitReport limit_flow_map(const Scenario& s, const TrajectoryRecord& rec) {
  if (!rec.aligned)
    throw EalignError("limit_flow_map requires an aligned run (A <= tol_align * A0)");
  LimitReport lr;
  lr.kappa = s.kappa;
  lr.M0 = s.M0;
  lr.phi_sup = s.kernel.sup_value();
  lr.phi_floor = rec.fc.kernel_floor;

  const Frame& fin = rec.last();
  const double A_T = fin.diag.amplitude;
  lr.extrap_error_bound = A_T / rec.fc.b;

  const size_t nf = rec.frames.size();
  double rate = rec.fc.b;
  double rate_d = rec.fc.b;
  bool fit_ok = false;
  if (nf >= 3 && A_T > 0.0) {
    ArrayXd t(3), A(3), Dv(3);
    for (int k = 0; k < 3; ++k) {
      const Frame& f = rec.frames[nf - 3 + static_cast<size_t>(k)];
      t[k] = f.t;
      A[k] = f.diag.amplitude;
      Dv[k] = f.dV1.abs().maxCoeff();
    }
    const TailFit fa = fit_decay_rate(t, A);
    if (fa.valid && fa.rate > 0.1 * rec.fc.b &&
        fa.rate < 10.0 * s.kappa * s.M0 * s.kernel.sup_value()) {
      rate = fa.rate;
      fit_ok = true;
      const TailFit fd = fit_decay_rate(t, Dv);
      rate_d = fd.valid ? fd.rate : fa.rate;
    }
  }
  lr.tail_fit_ok = fit_ok;
  lr.fitted_rate = rate;
  if (fit_ok) {
    lr.xbar = fin.X + fin.V / rate;
    lr.dx1bar = fin.dX1 + fin.dV1 / rate_d;
  } else {
    lr.xbar = fin.X;
    lr.dx1bar = fin.dX1;
    lr.warning_fallback = A_T > 0.0;
  }
  return lr;
}

void limit_measure(LimitReport& lr, const Scenario& s, const LimitOptions& opt) {
  const Index n = s.labels();
  lr.zs = zero_set(s, opt.zero_set);
  lr.collapse_tol = opt.collapse_tol > 0.0
                        ? opt.collapse_tol
                        : std::max(1e-6, 2.0 * lr.extrap_error_bound);
  const double mass_tol = opt.atom_mass_tol_frac * s.M0;
  lr.on_z.assign(static_cast<size_t>(n), 0);
  lr.singular_atoms.clear();

  const double btol = 1e-12 * (1.0 + s.omega.length(0));
  for (const ZeroSlice& zsl : lr.zs.slices) {
    const auto& sl = s.slices[static_cast<size_t>(zsl.slice_index)];
    for (const ZInterval& zi : zsl.z) {
      if (zi.degenerate || zi.mass <= mass_tol) continue;
      // Collapse is a property of the measure's image: only mass-carrying
      // points count (the interval may contain vacuum stretches where labels
      // do not exist and X̄ is unconstrained by the check).
      double img_lo = std::numeric_limits<double>::infinity();
      double img_hi = -img_lo;
      double x_at_leftmost = 0.0;
      double leftmost = std::numeric_limits<double>::infinity();
      for (Index i = sl.begin; i < sl.end; ++i) {
        if (s.a1[i] < zi.lo || s.a1[i] > zi.hi) continue;
        lr.on_z[static_cast<size_t>(i)] = 1;
        img_lo = std::min(img_lo, lr.xbar[i]);
        img_hi = std::max(img_hi, lr.xbar[i]);
        if (s.a1[i] < leftmost) {
          leftmost = s.a1[i];
          x_at_leftmost = lr.xbar[i];
        }
      }
      for (Index i = s.n_ac; i < n; ++i) {
        const bool same_slice =
            s.dim == 1 || std::abs(s.a2[i] - zsl.a2_value) <= 0.5 * s.m0.h2 + btol;
        if (same_slice && s.a1[i] >= zi.lo - btol && s.a1[i] <= zi.hi + btol) {
          lr.on_z[static_cast<size_t>(i)] = 1;
          img_lo = std::min(img_lo, lr.xbar[i]);
          img_hi = std::max(img_hi, lr.xbar[i]);
          if (s.a1[i] < leftmost) {
            leftmost = s.a1[i];
            x_at_leftmost = lr.xbar[i];
          }
        }
      }
      if (!(img_hi >= img_lo)) continue;  // no mass points despite zi.mass > 0
      const double diam = img_hi - img_lo;
      if (diam > lr.collapse_tol)
        throw EalignError(
            "Z-interval image not collapsed: diameter " + std::to_string(diam) +
            " exceeds tolerance " + std::to_string(lr.collapse_tol) +
            "; extend the run (raise t_max or tighten tol_align)");
      if (s.dim == 1) {
        Atom a;
        a.x1 = x_at_leftmost;
        a.mass = zi.mass;
        lr.singular_atoms.push_back(a);
      }
    }
  }

  // Initial ν atoms in P push forward as atoms (Z-side ones already counted).
  for (Index i = s.n_ac; i < n; ++i) {
    if (lr.on_z[static_cast<size_t>(i)]) continue;
    Atom a;
    a.x1 = lr.xbar[i];
    a.x2 = s.dim == 2 ? s.a2[i] : 0.0;
    a.mass = s.w[i];
    lr.singular_atoms.push_back(a);
  }

  // Density samples on P-labels: ρ̄∘X̄ = ρ₀ / ∂₁X̄.
  lr.rho_bar = ArrayXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  double ac = 0.0, sing = 0.0;
  for (Index i = 0; i < n; ++i) {
    const bool is_atom = i >= s.n_ac;
    if (lr.on_z[static_cast<size_t>(i)]) {
      sing += s.w[i];
      continue;
    }
    if (is_atom) {
      sing += s.w[i];
      continue;
    }
    ac += s.w[i];
    if (lr.dx1bar[i] > 0.0) lr.rho_bar[i] = s.rho0[i] / lr.dx1bar[i];
  }
  lr.ac_mass = ac;
  lr.singular_mass = sing;
}

BoundCheck check_separation_bounds(LimitReport& lr, const Scenario& s, Index n_pairs,
                                   std::uint64_t seed, double rel_slack) {
  BoundCheck bc;
  bc.name = "separation-bounds(1.11)";
  std::mt19937_64 rng(seed);
  const double extra = 2.0 * lr.extrap_error_bound + 1e-12;
  std::uniform_int_distribution<size_t> pick_slice(0, s.slices.size() - 1);
  bc.worst = std::numeric_limits<double>::infinity();
  for (Index draws = 0; bc.checked < n_pairs && draws < 100 * n_pairs; ++draws) {
    const auto& sl = s.slices[pick_slice(rng)];
    if (sl.end - sl.begin < 2) continue;
    std::uniform_int_distribution<Index> pick(sl.begin, sl.end - 1);
    Index i = pick(rng), j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    const double I = s.e0_int(s.a1[i], s.a1[j], sl.a2_value);
    const double lo = I / (s.kappa * s.M0 * lr.phi_sup);
    const double up = I / (s.kappa * s.M0 * lr.phi_floor);
    const double dX = lr.xbar[j] - lr.xbar[i];
    const double m_lo = dX - (lo - rel_slack * std::abs(lo) - extra);
    const double m_up = (up + rel_slack * std::abs(up) + extra) - dX;
    ++bc.checked;
    const double margin = std::min(m_lo, m_up);
    bc.worst = std::min(bc.worst, margin);
    if (margin < 0.0) ++bc.violations;
  }
  bc.passed = bc.violations == 0;
  bc.detail = "pairs=" + std::to_string(bc.checked) +
              " worst_margin=" + short_g(bc.worst);
  lr.checks.push_back(bc);
  return bc;
}

ImageBounds measure_image_bounds(const LimitReport& lr, const Scenario& s,
                                 const std::vector<std::pair<double, double>>& E,
                                 Index slice_index) {
  const auto& sl = s.slices.at(static_cast<size_t>(slice_index));
  ImageBounds out;
  std::vector<std::pair<double, double>> images;
  for (const auto& [a, b] : E) {
    const double I = s.e0_int(a, b, sl.a2_value);
    out.lower += I / (s.kappa * s.M0 * lr.phi_sup);
    out.upper += I / (s.kappa * s.M0 * lr.phi_floor);
    images.emplace_back(xbar_at(lr, s, a, slice_index), xbar_at(lr, s, b, slice_index));
  }
  std::sort(images.begin(), images.end());
  double measured = 0.0, cursor = -std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : images) {
    const double a = std::max(lo, cursor), b = std::max(hi, cursor);
    measured += b - a;
    cursor = std::max(cursor, b);
  }
  out.measured = measured;
  return out;
}

BoundCheck check_density_bounds(LimitReport& lr, const Scenario& s, double eps_p_frac,
                                double rel_slack) {
  BoundCheck bc;
  bc.name = "density-bounds(1.15)";
  const double eps_p = eps_p_frac * s.e0_lbl.maxCoeff();
  bc.worst = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < s.n_ac; ++i) {
    if (lr.on_z[static_cast<size_t>(i)] || s.e0_lbl[i] < eps_p || s.rho0[i] <= 0.0)
      continue;
    const double rb = lr.rho_bar[i];
    if (!std::isfinite(rb)) {
      ++bc.checked;
      ++bc.violations;
      bc.worst = std::min(bc.worst, -1.0);
      continue;
    }
    const double lo = s.kappa * s.M0 * lr.phi_floor * s.rho0[i] / s.e0_lbl[i];
    const double up = s.kappa * s.M0 * lr.phi_sup * s.rho0[i] / s.e0_lbl[i];
    const double m_lo = rb - lo * (1.0 - rel_slack);
    const double m_up = up * (1.0 + rel_slack) - rb;
    ++bc.checked;
    const double margin = std::min(m_lo, m_up) / std::max(1e-300, up);
    bc.worst = std::min(bc.worst, margin);
    if (margin < 0.0) ++bc.violations;
  }
  bc.passed = bc.violations == 0;
  bc.detail = "labels=" + std::to_string(bc.checked) + " eps_p=" + short_g(eps_p) +
              " worst_rel_margin=" + short_g(bc.worst);
  lr.checks.push_back(bc);
  return bc;
}

void aggregation_curves(LimitReport& lr, const Scenario& s) {
  if (s.dim != 2) throw EalignError("aggregation_curves requires n = 2");
  // Per-row counted intervals in slice order (slices are a2-ascending).
  std::vector<std::vector<CurveSample>> rows;
  for (const ZeroSlice& zsl : lr.zs.slices) {
    std::vector<CurveSample> row;
    const auto& sl = s.slices[static_cast<size_t>(zsl.slice_index)];
    for (const ZInterval& zi : zsl.z) {
      if (zi.degenerate || zi.mass <= 0.0) continue;
      CurveSample cs;
      cs.a2 = zsl.a2_value;
      cs.lo = zi.lo;
      cs.hi = zi.hi;
      double img_lo = std::numeric_limits<double>::infinity();
      double img_hi = -img_lo;
      for (Index i = sl.begin; i < sl.end; ++i) {
        if (s.a1[i] < zi.lo || s.a1[i] > zi.hi) continue;
        img_lo = std::min(img_lo, lr.xbar[i]);
        img_hi = std::max(img_hi, lr.xbar[i]);
      }
      if (!(img_hi >= img_lo)) continue;  // no labels landed inside
      cs.image_diam = img_hi - img_lo;
      cs.fhat = 0.5 * (img_lo + img_hi);
      cs.weight = integrate([&](double x) { return s.rho0_fn(x, cs.a2); }, zi.lo, zi.hi,
                            1e-10, 1e-14);
      row.push_back(cs);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }

  // Link row intervals across adjacent rows by α₁-overlap. A branch covering
  // k > 1 intervals in the next row splits into k branches sharing its
  // history (maximal x₁-convex components overlap on the shared α₋-range).
  const double tol = s.m0.h1;
  auto overlaps = [tol](const CurveSample& a, const CurveSample& b) {
    return a.lo <= b.hi + tol && b.lo <= a.hi + tol;
  };
  std::vector<CurveBranch> open, closed;
  std::vector<CurveSample> open_last;
  for (const auto& row : rows) {
    std::vector<CurveBranch> next;
    std::vector<CurveSample> next_last;
    std::vector<char> interval_used(row.size(), 0);
    for (size_t bidx = 0; bidx < open.size(); ++bidx) {
      std::vector<size_t> hits;
      for (size_t k = 0; k < row.size(); ++k)
        if (overlaps(open_last[bidx], row[k])) hits.push_back(k);
      if (hits.empty()) {
        closed.push_back(std::move(open[bidx]));
        continue;
      }
      for (size_t k : hits) {
        interval_used[k] = 1;
        CurveBranch br = open[bidx];  // split duplicates the shared history
        br.samples.push_back(row[k]);
        next.push_back(std::move(br));
        next_last.push_back(row[k]);
      }
    }
    for (size_t k = 0; k < row.size(); ++k) {
      if (interval_used[k]) continue;
      CurveBranch br;
      br.samples.push_back(row[k]);
      next.push_back(std::move(br));
      next_last.push_back(row[k]);
    }
    // At a merge row several branches extend with the same interval and stay
    // distinct; their sample lists overlap there (tangency at bifurcations).
    open = std::move(next);
    open_last = std::move(next_last);
  }
  for (auto& b : open) closed.push_back(std::move(b));
  lr.curves = std::move(closed);
}

Decomp1D decomposition_1d(const LimitReport& lr, const Scenario& s) {
  if (s.dim != 1) throw EalignError("decomposition_1d requires n = 1");
  Decomp1D d;
  std::vector<double> xs, ws;
  for (Index i = 0; i < s.n_ac; ++i) {
    if (lr.on_z[static_cast<size_t>(i)]) continue;
    xs.push_back(lr.xbar[i]);
    ws.push_back(s.w[i]);
  }
  d.x = Eigen::Map<const ArrayXd>(xs.data(), static_cast<Index>(xs.size()));
  d.w = Eigen::Map<const ArrayXd>(ws.data(), static_cast<Index>(ws.size()));
  d.atoms = lr.singular_atoms;
  d.total = s.M0;
  return d;
}

double ball_mass(const Decomp1D& d, double x, double r) {
  double m = 0.0;
  for (Index i = 0; i < d.x.size(); ++i)
    if (std::abs(d.x[i] - x) < r) m += d.w[i];
  for (const Atom& a : d.atoms)
    if (std::abs(a.x1 - x) < r) m += a.mass;
  return m;
}

}  // namespace ealign
