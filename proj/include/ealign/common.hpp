// Shared scalar/array aliases and small numeric utilities used across ealign.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ealign {

using Eigen::Index;
using ArrayXd = Eigen::ArrayXd;
using ArrayXi = Eigen::ArrayXi;

// Axis-aligned compact box in n = 1 or 2 dimensions.
struct Box {
  int dim = 1;
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};

  static Box interval(double a, double b) { return Box{1, {a, 0.0}, {b, 0.0}}; }
  static Box rect(double a1, double b1, double a2, double b2) {
    return Box{2, {a1, a2}, {b1, b2}};
  }
  double length(int axis = 0) const { return hi[axis] - lo[axis]; }
  bool contains(double x1, double x2 = 0.0) const {
    const double eps = 1e-12 * (1.0 + length(0));
    bool ok = x1 >= lo[0] - eps && x1 <= hi[0] + eps;
    if (dim == 2) ok = ok && x2 >= lo[1] - eps && x2 <= hi[1] + eps;
    return ok;
  }
  double diameter() const {
    const double d1 = length(0);
    if (dim == 1) return d1;
    return std::hypot(d1, length(1));
  }
};

struct Atom {
  double x1 = 0.0;
  double x2 = 0.0;  // unused in n = 1
  double mass = 0.0;
};

class EalignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compensated summation: vectorized fixed-size block partial sums combined by
// Neumaier accumulation in block order. The result is independent of worker
// count because the block decomposition is fixed.
inline constexpr Index kSumBlock = 1024;

template <class Derived>
double blocked_sum(const Eigen::ArrayBase<Derived>& v) {
  const Index n = v.size();
  double s = 0.0, comp = 0.0;
  for (Index k = 0; k < n; k += kSumBlock) {
    const Index len = std::min(kSumBlock, n - k);
    const double x = v.derived().segment(k, len).sum();
    const double t = s + x;
    comp += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + comp;
}

// Two simultaneous reductions sharing one streaming pass: (Σ aᵢ, Σ aᵢ bᵢ).
template <class DA, class DB>
void blocked_sum2(const Eigen::ArrayBase<DA>& a, const Eigen::ArrayBase<DB>& b,
                  double& sum_a, double& sum_ab) {
  const Index n = a.size();
  double s0 = 0.0, c0 = 0.0, s1 = 0.0, c1 = 0.0;
  for (Index k = 0; k < n; k += kSumBlock) {
    const Index len = std::min(kSumBlock, n - k);
    const auto seg = a.derived().segment(k, len);
    const double x0 = seg.sum();
    const double x1 = (seg * b.derived().segment(k, len)).sum();
    double t = s0 + x0;
    c0 += (std::abs(s0) >= std::abs(x0)) ? (s0 - t) + x0 : (x0 - t) + s0;
    s0 = t;
    t = s1 + x1;
    c1 += (std::abs(s1) >= std::abs(x1)) ? (s1 - t) + x1 : (x1 - t) + s1;
    s1 = t;
  }
  sum_a = s0 + c0;
  sum_ab = s1 + c1;
}

inline double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

inline double sqr(double x) { return x * x; }

// FNV-1a over a byte string; used for manifest hashes.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ealign
