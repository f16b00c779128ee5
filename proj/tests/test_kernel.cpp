#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/kernel.hpp"
#include "ealign/quadrature.hpp"

#include <cmath>

using namespace ealign;

namespace {
const double kAsinh1 = 0.8813735870195430;  // ∫₀¹ (1+y²)^{-1/2} dy
}

TEST_CASE("eval: constant and power-tail values") {
  const Kernel c = Kernel::constant(1.0, 2);
  CHECK(c.eval(3.7, -2.0) == 1.0);
  CHECK(c.sup_value() == 1.0);
  CHECK(c.grad_sup() == 0.0);

  const Kernel p = Kernel::power_tail(1.0, 1.0, 2);
  CHECK(p.eval(0.0, 0.0) == 1.0);  // φ(0) = scale
  CHECK(p.eval(std::sqrt(3.0), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.eval(1.0, std::sqrt(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.heavy_tailed());
  CHECK_FALSE(Kernel::power_tail(2.0).heavy_tailed());
  CHECK(p.grad_sup() == doctest::Approx(0.3849001794597505).epsilon(1e-12));
}

TEST_CASE("primitive: closed forms against the quadrature oracle") {
  const Kernel c = Kernel::constant(1.0);
  CHECK(c.primitive(0.7) == doctest::Approx(0.7).epsilon(1e-15));
  const Kernel p = Kernel::power_tail(1.0);
  CHECK(p.primitive(0.0) == 0.0);
  CHECK(p.primitive(1.0) == doctest::Approx(kAsinh1).epsilon(1e-13));
  // odd in x1
  CHECK(p.primitive(-1.0) == doctest::Approx(-kAsinh1).epsilon(1e-13));

  // independent oracle: adaptive quadrature of the radial profile
  for (double x1 : {0.3, 1.7, 4.0}) {
    const double q = integrate([&](double y) { return p.radial(y); }, 0.0, x1, 1e-12);
    CHECK(p.primitive(x1) == doctest::Approx(q).epsilon(1e-10));
  }
  const Kernel p2d = Kernel::power_tail(1.0, 1.0, 2);
  for (double x2 : {0.0, 0.8, 2.5}) {
    const double q = integrate([&](double y) { return p2d.eval(y, x2); }, 0.0, 1.3, 1e-12);
    CHECK(p2d.primitive(1.3, x2) == doctest::Approx(q).epsilon(1e-10));
  }
  // s = 2 and s = 3 closed forms
  const Kernel pa = Kernel::power_tail(2.0);
  const double qa = integrate([&](double y) { return pa.radial(y); }, 0.0, 2.0, 1e-12);
  CHECK(pa.primitive(2.0) == doctest::Approx(qa).epsilon(1e-10));
  const Kernel pb = Kernel::power_tail(3.0);
  const double qb = integrate([&](double y) { return pb.radial(y); }, 0.0, 2.0, 1e-12);
  CHECK(pb.primitive(2.0) == doctest::Approx(qb).epsilon(1e-10));
}

TEST_CASE("primitive: monotone-integrand bracketing and derivative") {
  const Kernel p = Kernel::power_tail(1.0);
  for (double x1 : {-1.2, 0.0, 0.4, 2.0}) {
    for (double h : {1e-3, 0.1, 0.5}) {
      const double inc = p.primitive(x1 + h) - p.primitive(x1);
      double lo = p.radial(std::abs(x1));
      double hi = p.radial(std::abs(x1 + h));
      if (lo > hi) std::swap(lo, hi);
      if (x1 < 0.0 && x1 + h > 0.0) hi = p.sup_value();  // interval straddles 0
      CHECK(inc >= h * lo - 1e-12);
      CHECK(inc <= h * hi + 1e-12);
    }
    // ∂/∂x1 primitive = eval, by central differences
    const double h = 1e-6;
    const double d = (p.primitive(x1 + h) - p.primitive(x1 - h)) / (2.0 * h);
    CHECK(d == doctest::Approx(p.eval(x1)).epsilon(1e-6));
  }
}

TEST_CASE("flocking constants: closed forms, bisection, monotonicity") {
  const Kernel c = Kernel::constant(1.0);
  const FlockingConstants f1 = c.flocking_constants(1.0, 0.5, 1.0, 1.0);
  CHECK(f1.diam_bound == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f1.kernel_floor == 1.0);
  CHECK(f1.a == 0.0);  // ∇φ ≡ 0

  const FlockingConstants f0 = c.flocking_constants(1.0, 0.0, 1.0, 1.0);
  CHECK(f0.diam_bound == 1.0);
  CHECK(f0.kernel_floor == 1.0);

  // PowerTail s=1: κM₀ ∫_{1}^{D̄}(1+r²)^{-1/2} = 1 inverts to sinh(1 + asinh(1)).
  const Kernel p = Kernel::power_tail(1.0);
  const FlockingConstants fp = p.flocking_constants(1.0, 1.0, 1.0, 1.0);
  CHECK(fp.diam_bound == doctest::Approx(std::sinh(1.0 + std::asinh(1.0))).epsilon(1e-10));
  CHECK(fp.kernel_floor == doctest::Approx(p.radial(fp.diam_bound)).epsilon(1e-14));
  CHECK(fp.b == doctest::Approx(fp.kernel_floor).epsilon(1e-14));
  CHECK(fp.a == doctest::Approx(p.grad_sup()).epsilon(1e-14));

  // larger A0 → larger D̄ and smaller kernel floor
  double prev_d = 1.0, prev_floor = 2.0;
  for (double A0 : {0.1, 0.5, 1.0, 2.0}) {
    const FlockingConstants f = p.flocking_constants(1.0, A0, 1.0, 1.0);
    CHECK(f.diam_bound > prev_d);
    CHECK(f.kernel_floor < prev_floor);
    prev_d = f.diam_bound;
    prev_floor = f.kernel_floor;
  }

  CHECK_THROWS_WITH_AS(Kernel::power_tail(2.0).flocking_constants(1.0, 1.0, 1.0, 1.0),
                       doctest::Contains("no a-priori diameter bound"), EalignError);
}

TEST_CASE("tabulated kernel: interpolation, tail verification, invariants") {
  const Kernel ref = Kernel::power_tail(1.0);
  const Index n = 64;
  ArrayXd r(n), phi(n);
  for (Index i = 0; i < n; ++i) {
    r[i] = 0.25 * static_cast<double>(i);
    phi[i] = ref.radial(r[i]);
  }
  const Kernel t = Kernel::tabulated(r, phi, true);
  CHECK(t.sup_value() == 1.0);
  for (double x : {0.1, 0.9, 3.3, 7.7})
    CHECK(t.radial(x) == doctest::Approx(ref.radial(x)).epsilon(1e-2));
  // refining the table refines the interpolant
  const Index nf = 512;
  ArrayXd rf(nf), pf(nf);
  for (Index i = 0; i < nf; ++i) {
    rf[i] = 16.0 * static_cast<double>(i) / (nf - 1);
    pf[i] = ref.radial(rf[i]);
  }
  const Kernel tf = Kernel::tabulated(rf, pf, true);
  for (double x : {0.1, 0.9, 3.3, 7.7})
    CHECK(tf.radial(x) == doctest::Approx(ref.radial(x)).epsilon(1e-5));
  // extrapolated tail beyond the last sample stays positive and decreasing
  CHECK(t.radial(20.0) > 0.0);
  CHECK(t.radial(30.0) < t.radial(20.0));
  CHECK(t.grad_sup() == doctest::Approx(ref.grad_sup()).epsilon(0.05));

  // declaring the wrong tail class is rejected
  CHECK_THROWS_AS(Kernel::tabulated(r, phi, false), EalignError);
  ArrayXd bad = phi;
  bad[10] = bad[9] * 1.5;  // not nonincreasing
  CHECK_THROWS_AS(Kernel::tabulated(r, bad, true), EalignError);

  // light-tailed table: φ ~ r^{-2}
  ArrayXd phi2(n);
  for (Index i = 0; i < n; ++i) phi2[i] = 1.0 / (1.0 + r[i] * r[i]);
  CHECK_THROWS_AS(Kernel::tabulated(r, phi2, true), EalignError);
  const Kernel t2 = Kernel::tabulated(r, phi2, false);
  CHECK_FALSE(t2.heavy_tailed());
}

TEST_CASE("radial integral closed forms") {
  const Kernel p = Kernel::power_tail(1.0);
  CHECK(p.radial_integral(0.0, 1.0) == doctest::Approx(kAsinh1).epsilon(1e-13));
  const Kernel c = Kernel::constant(2.0);
  CHECK(c.radial_integral(1.0, 4.0) == doctest::Approx(6.0).epsilon(1e-14));
}
