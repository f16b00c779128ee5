#include "ealign/measure.hpp"

#include "ealign/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ealign {

namespace {

void check_measure(const MassMeasure& m) {
  if (m.labels() == 0 && m.atoms.empty())
    throw EalignError("measure must carry positive mass");
  for (const Atom& a : m.atoms) {
    if (!(a.mass > 0.0)) throw EalignError("atom weights must be positive");
    if (!m.omega.contains(a.x1, a.x2)) throw EalignError("atom outside support box");
  }
  if (m.labels() > 0 && !(m.w > 0.0).all())
    throw EalignError("label weights must be positive");
  if (!(total_mass(m) > 0.0)) throw EalignError("measure must carry positive mass");
}

void normalize_measure(MassMeasure& m) {
  const double M = total_mass(m);
  m.w /= M;
  m.rho0 /= M;
  for (Atom& a : m.atoms) a.mass /= M;
}

}  // namespace

MassMeasure lump_density_1d(const std::function<double(double)>& rho, const Box& omega,
                            Index n_cells, std::vector<Atom> atoms, bool normalize) {
  if (n_cells < 1) throw EalignError("grid resolution must be positive");
  MassMeasure m;
  m.dim = 1;
  m.omega = omega;
  m.h1 = omega.length(0) / static_cast<double>(n_cells);
  std::vector<double> xs, ws, rs;
  xs.reserve(n_cells);
  for (Index i = 0; i < n_cells; ++i) {
    const double x = omega.lo[0] + (static_cast<double>(i) + 0.5) * m.h1;
    const double r = rho(x);
    if (r < 0.0) throw EalignError("density must be nonnegative");
    if (r == 0.0) continue;
    xs.push_back(x);
    ws.push_back(r * m.h1);
    rs.push_back(r);
  }
  m.a1 = Eigen::Map<const ArrayXd>(xs.data(), static_cast<Index>(xs.size()));
  m.w = Eigen::Map<const ArrayXd>(ws.data(), static_cast<Index>(ws.size()));
  m.rho0 = Eigen::Map<const ArrayXd>(rs.data(), static_cast<Index>(rs.size()));
  m.atoms = std::move(atoms);
  check_measure(m);
  if (normalize) normalize_measure(m);
  return m;
}

MassMeasure lump_density_2d(const std::function<double(double, double)>& rho,
                            const Box& omega, Index n1, Index n2,
                            std::vector<Atom> atoms, bool normalize) {
  if (n1 < 1 || n2 < 1) throw EalignError("grid resolution must be positive");
  MassMeasure m;
  m.dim = 2;
  m.omega = omega;
  m.h1 = omega.length(0) / static_cast<double>(n1);
  m.h2 = omega.length(1) / static_cast<double>(n2);
  std::vector<double> xs, ys, ws, rs;
  for (Index j = 0; j < n2; ++j) {
    const double y = omega.lo[1] + (static_cast<double>(j) + 0.5) * m.h2;
    for (Index i = 0; i < n1; ++i) {
      const double x = omega.lo[0] + (static_cast<double>(i) + 0.5) * m.h1;
      const double r = rho(x, y);
      if (r < 0.0) throw EalignError("density must be nonnegative");
      if (r == 0.0) continue;
      xs.push_back(x);
      ys.push_back(y);
      ws.push_back(r * m.h1 * m.h2);
      rs.push_back(r);
    }
  }
  m.a1 = Eigen::Map<const ArrayXd>(xs.data(), static_cast<Index>(xs.size()));
  m.a2 = Eigen::Map<const ArrayXd>(ys.data(), static_cast<Index>(ys.size()));
  m.w = Eigen::Map<const ArrayXd>(ws.data(), static_cast<Index>(ws.size()));
  m.rho0 = Eigen::Map<const ArrayXd>(rs.data(), static_cast<Index>(rs.size()));
  m.atoms = std::move(atoms);
  check_measure(m);
  if (normalize) normalize_measure(m);
  return m;
}

double total_mass(const MassMeasure& m) {
  double s = m.labels() > 0 ? blocked_sum(m.w) : 0.0;
  for (const Atom& a : m.atoms) s += a.mass;
  return s;
}

double convolve(const Kernel& k, const MassMeasure& m, double x1, double x2,
                const ArrayXd& pos1, const ArrayXd& pos2) {
  if (pos1.size() != m.labels())
    throw EalignError("convolve: positions indexed differently from measure labels");
  double s = 0.0;
  if (m.labels() > 0) {
    if (m.dim == 1) {
      if (k.family() == KernelFamily::Constant) {
        s = k.sup_value() * blocked_sum(m.w);
      } else if (k.family() == KernelFamily::PowerTail && k.exponent() == 1.0) {
        const ArrayXd d = x1 - pos1;
        s = k.amplitude() * blocked_sum(m.w * (1.0 + d * d).rsqrt());
      } else {
        ArrayXd vals(m.labels());
        for (Index i = 0; i < m.labels(); ++i) vals[i] = k.eval(x1 - pos1[i]);
        s = blocked_sum(m.w * vals);
      }
    } else {
      if (pos2.size() != m.labels())
        throw EalignError("convolve: lateral positions indexed differently");
      if (k.family() == KernelFamily::Constant) {
        s = k.sup_value() * blocked_sum(m.w);
      } else if (k.family() == KernelFamily::PowerTail && k.exponent() == 1.0) {
        const ArrayXd d1 = x1 - pos1, d2 = x2 - pos2;
        s = k.amplitude() * blocked_sum(m.w * (1.0 + d1 * d1 + d2 * d2).rsqrt());
      } else {
        ArrayXd vals(m.labels());
        for (Index i = 0; i < m.labels(); ++i)
          vals[i] = k.eval(x1 - pos1[i], x2 - pos2[i]);
        s = blocked_sum(m.w * vals);
      }
    }
  }
  for (const Atom& a : m.atoms) s += a.mass * k.eval(x1 - a.x1, x2 - a.x2);
  return s;
}

double convolve(const Kernel& k, const MassMeasure& m, double x1, const ArrayXd& pos1) {
  return convolve(k, m, x1, 0.0, pos1, ArrayXd());
}

Weighted1D weighted_points_1d(const MassMeasure& m, const ArrayXd& positions) {
  if (m.dim != 1) throw EalignError("weighted_points_1d: unsupported dimension");
  if (positions.size() != m.labels())
    throw EalignError("weighted_points_1d: position/label mismatch");
  const Index n = m.labels() + static_cast<Index>(m.atoms.size());
  Weighted1D out;
  out.x.resize(n);
  out.w.resize(n);
  out.x.head(m.labels()) = positions;
  out.w.head(m.labels()) = m.w;
  for (Index i = 0; i < static_cast<Index>(m.atoms.size()); ++i) {
    out.x[m.labels() + i] = m.atoms[static_cast<size_t>(i)].x1;
    out.w[m.labels() + i] = m.atoms[static_cast<size_t>(i)].mass;
  }
  return out;
}

double w1_distance_1d(const Weighted1D& mu, const Weighted1D& nu) {
  const double Mmu = blocked_sum(mu.w), Mnu = blocked_sum(nu.w);
  if (std::abs(Mmu - Mnu) > 1e-12 * std::max(Mmu, Mnu))
    throw EalignError("w1_distance_1d requires equal total masses");
  // Merge the signed jumps of F_mu - F_nu and integrate |F| between breakpoints.
  const Index n = mu.x.size() + nu.x.size();
  std::vector<std::pair<double, double>> jumps;
  jumps.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < mu.x.size(); ++i) jumps.emplace_back(mu.x[i], mu.w[i]);
  for (Index i = 0; i < nu.x.size(); ++i) jumps.emplace_back(nu.x[i], -nu.w[i]);
  std::sort(jumps.begin(), jumps.end());
  double dist = 0.0, F = 0.0;
  for (size_t i = 0; i + 1 < jumps.size(); ++i) {
    F += jumps[i].second;
    dist += std::abs(F) * (jumps[i + 1].first - jumps[i].first);
  }
  return dist;
}

double w1_distance_1d(const MassMeasure& mu, const ArrayXd& mu_pos,
                      const MassMeasure& nu, const ArrayXd& nu_pos) {
  if (mu.dim != 1 || nu.dim != 1)
    throw EalignError("w1_distance_1d: unsupported dimension (n must be 1)");
  return w1_distance_1d(weighted_points_1d(mu, mu_pos), weighted_points_1d(nu, nu_pos));
}

namespace {

template <class PointOp>
ArrayXd batched_pair_sum(const ArrayXd& at1, const PointOp& op) {
  ArrayXd out(at1.size());
  for_chunks(at1.size(), [&](Index b, Index e) {
    for (Index k = b; k < e; ++k) out[k] = op(k);
  });
  return out;
}

}  // namespace

ArrayXd convolve_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                      const ArrayXd& src2, const ArrayXd& at1, const ArrayXd& at2) {
  const bool two_d = src2.size() > 0;
  if (k.family() == KernelFamily::Constant) {
    const double v = k.sup_value() * blocked_sum(w);
    return ArrayXd::Constant(at1.size(), v);
  }
  if (k.family() == KernelFamily::PowerTail && k.exponent() == 1.0) {
    const double amp = k.amplitude();
    return batched_pair_sum(at1, [&](Index i) {
      const ArrayXd d1 = at1[i] - src1;
      if (!two_d) return amp * blocked_sum(w * (1.0 + d1 * d1).rsqrt());
      const ArrayXd d2 = at2[i] - src2;
      return amp * blocked_sum(w * (1.0 + d1 * d1 + d2 * d2).rsqrt());
    });
  }
  return batched_pair_sum(at1, [&](Index i) {
    ArrayXd vals(src1.size());
    for (Index j = 0; j < src1.size(); ++j)
      vals[j] = k.eval(at1[i] - src1[j], two_d ? at2[i] - src2[j] : 0.0);
    return blocked_sum(w * vals);
  });
}

ArrayXd primitive_convolve_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                                const ArrayXd& src2, const ArrayXd& at1,
                                const ArrayXd& at2) {
  const bool two_d = src2.size() > 0;
  if (k.family() == KernelFamily::Constant) {
    // ϕ(x) = amplitude · x: Σ w ϕ(at − src) = amp (at · M₀ − Σ w src).
    const double M = blocked_sum(w);
    const double c = blocked_sum(w * src1);
    return k.sup_value() * (at1 * M - c);
  }
  if (k.family() == KernelFamily::PowerTail && k.exponent() == 1.0) {
    const double amp = k.amplitude();
    return batched_pair_sum(at1, [&](Index i) {
      if (!two_d) {
        const ArrayXd d = at1[i] - src1;
        return amp * blocked_sum(w * (d + (1.0 + d * d).sqrt()).log());
      }
      const ArrayXd inv = (1.0 + (at2[i] - src2).square()).rsqrt();
      const ArrayXd z = (at1[i] - src1) * inv;
      return amp * blocked_sum(w * (z + (1.0 + z * z).sqrt()).log());
    });
  }
  return batched_pair_sum(at1, [&](Index i) {
    ArrayXd vals(src1.size());
    for (Index j = 0; j < src1.size(); ++j)
      vals[j] = k.primitive(at1[i] - src1[j], two_d ? at2[i] - src2[j] : 0.0);
    return blocked_sum(w * vals);
  });
}

ArrayXd primitive_dlat_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                            const ArrayXd& src2, const ArrayXd& at1, const ArrayXd& at2) {
  if (src2.size() == 0) return ArrayXd::Zero(at1.size());
  if (k.family() == KernelFamily::Constant) return ArrayXd::Zero(at1.size());
  if (k.family() == KernelFamily::PowerTail && k.exponent() == 1.0) {
    const double amp = k.amplitude();
    return batched_pair_sum(at1, [&](Index i) {
      const ArrayXd c = at2[i] - src2;
      const ArrayXd x = at1[i] - src1;
      const ArrayXd a2 = 1.0 + c.square();
      return -amp * blocked_sum(w * c * x / (a2 * (a2 + x.square()).sqrt()));
    });
  }
  return batched_pair_sum(at1, [&](Index i) {
    ArrayXd vals(src1.size());
    for (Index j = 0; j < src1.size(); ++j)
      vals[j] = k.primitive_dlat(at1[i] - src1[j], at2[i] - src2[j]);
    return blocked_sum(w * vals);
  });
}

}  // namespace ealign
