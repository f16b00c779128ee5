// Compactly supported nonnegative mass measures: mass-lumped density labels
// on a uniform grid plus explicit atoms. Convolution against a kernel and the
// exact 1D Kantorovich–Rubinstein distance.
#pragma once

#include "ealign/common.hpp"
#include "ealign/kernel.hpp"

#include <functional>
#include <vector>

namespace ealign {

struct MassMeasure {
  int dim = 1;
  Box omega;
  // Label arrays (absolutely continuous part). a2/h2 used only in n = 2;
  // w = rho0 * cell volume (midpoint lumping).
  ArrayXd a1, a2, w, rho0;
  double h1 = 0.0, h2 = 0.0;
  std::vector<Atom> atoms;

  Index labels() const { return a1.size(); }
  double cell_volume() const { return dim == 1 ? h1 : h1 * h2; }
};

// Midpoint mass lumping of a density on a uniform grid over the box. Cells
// whose midpoint density vanishes are dropped (weights must stay positive).
MassMeasure lump_density_1d(const std::function<double(double)>& rho, const Box& omega,
                            Index n_cells, std::vector<Atom> atoms = {},
                            bool normalize = false);
MassMeasure lump_density_2d(const std::function<double(double, double)>& rho,
                            const Box& omega, Index n1, Index n2,
                            std::vector<Atom> atoms = {}, bool normalize = false);

double total_mass(const MassMeasure& m);

// Σᵢ wᵢ φ(x − Xᵢ) + Σ atoms; `pos1`/`pos2` are the current label positions
// (pass the label coordinates themselves for a convolution against m₀).
// Atom positions are taken as-is (they ride with the labels only when the
// caller moves them; see dynamics).
double convolve(const Kernel& k, const MassMeasure& m, double x1, double x2,
                const ArrayXd& pos1, const ArrayXd& pos2);
double convolve(const Kernel& k, const MassMeasure& m, double x1, const ArrayXd& pos1);

// A 1D weighted point cloud (labels and atoms flattened) for transport
// distances between pushed-forward measures.
struct Weighted1D {
  ArrayXd x, w;
};
Weighted1D weighted_points_1d(const MassMeasure& m, const ArrayXd& positions);

// Exact W₁ between equal-mass 1D discrete measures via the CDF-difference
// integral. Throws on unequal masses (rel tol 1e-12).
double w1_distance_1d(const Weighted1D& mu, const Weighted1D& nu);
double w1_distance_1d(const MassMeasure& mu, const ArrayXd& mu_pos,
                      const MassMeasure& nu, const ArrayXd& nu_pos);

// Batched weighted pair sums over a source particle cloud, evaluated at many
// points; deterministic at any worker count. src2/at2 may be empty (n = 1).
//   convolve_many:            Σⱼ wⱼ φ(atₖ − srcⱼ)
//   primitive_convolve_many:  Σⱼ wⱼ ϕ(atₖ − srcⱼ)   (signed partial primitive)
//   primitive_dlat_many:      Σⱼ wⱼ ∂ₓ₋ϕ(atₖ − srcⱼ)  (n = 2)
ArrayXd convolve_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                      const ArrayXd& src2, const ArrayXd& at1, const ArrayXd& at2);
ArrayXd primitive_convolve_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                                const ArrayXd& src2, const ArrayXd& at1,
                                const ArrayXd& at2);
ArrayXd primitive_dlat_many(const Kernel& k, const ArrayXd& w, const ArrayXd& src1,
                            const ArrayXd& src2, const ArrayXd& at1, const ArrayXd& at2);

}  // namespace ealign
