#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/measure.hpp"
#include "ealign/quadrature.hpp"

#include <cmath>
#include <random>

using namespace ealign;

namespace {

MassMeasure uniform_1d(double lo, double hi, double density, Index n,
                       std::vector<Atom> atoms = {}) {
  return lump_density_1d([density](double) { return density; },
                         Box::interval(lo, hi), n, std::move(atoms));
}

Weighted1D as_points(const MassMeasure& m) { return weighted_points_1d(m, m.a1); }

}  // namespace

TEST_CASE("total mass") {
  const MassMeasure m = uniform_1d(0.0, 1.0, 1.0, 100);
  CHECK(m.labels() == 100);
  CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-14));

  const MassMeasure withatoms =
      uniform_1d(0.0, 1.0, 1.0, 128, {{0.25, 0.0, 0.25}, {0.75, 0.0, 0.25}});
  CHECK(total_mass(withatoms) == doctest::Approx(1.5).epsilon(1e-14));

  // degenerate input rejected at construction
  CHECK_THROWS_AS(uniform_1d(0.0, 1.0, 0.0, 64), EalignError);
  CHECK_THROWS_AS(lump_density_1d([](double) { return -1.0; }, Box::interval(0, 1), 8),
                  EalignError);
  CHECK_THROWS_AS(uniform_1d(0.0, 1.0, 1.0, 8, {{0.5, 0.0, -0.1}}), EalignError);
  CHECK_THROWS_AS(uniform_1d(0.0, 1.0, 1.0, 8, {{7.0, 0.0, 0.1}}), EalignError);
}

TEST_CASE("normalization to unit mass") {
  const MassMeasure m = lump_density_2d([](double, double) { return 3.0; },
                                        Box::rect(0, 1, 0, 1), 16, 16, {}, true);
  CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convolve: constant kernel, atoms, quadrature refinement") {
  const Kernel c = Kernel::constant(2.0);
  const MassMeasure m = uniform_1d(-1.0, 1.0, 0.5, 256);
  for (double x : {-0.7, 0.0, 5.0})
    CHECK(convolve(c, m, x, m.a1) == doctest::Approx(2.0 * total_mass(m)).epsilon(1e-14));

  // single atom: m·φ(x−y)
  MassMeasure atom;
  atom.dim = 1;
  atom.omega = Box::interval(-2, 2);
  atom.atoms.push_back({0.5, 0.0, 0.3});
  const Kernel p = Kernel::power_tail(1.0);
  CHECK(convolve(p, atom, -0.5, ArrayXd()) ==
        doctest::Approx(0.3 * p.eval(-1.0)).epsilon(1e-14));

  // uniform density on [0,1], PowerTail at x = 0: midpoint lumping converges to
  // the adaptive-quadrature value of ∫₀¹ φ(y) dy
  const double exact = integrate([&](double y) { return p.radial(y); }, 0.0, 1.0, 1e-12);
  double prev = 1.0;
  for (Index n : {128, 512, 2048}) {
    const MassMeasure u = uniform_1d(0.0, 1.0, 1.0, n);
    const double err = std::abs(convolve(p, u, 0.0, u.a1) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("convolve: linearity and sup bound") {
  const Kernel p = Kernel::power_tail(1.0);
  const MassMeasure a = uniform_1d(-1.0, 0.0, 1.0, 200);
  const MassMeasure b = uniform_1d(0.0, 1.0, 2.0, 200);
  MassMeasure ab = lump_density_1d(
      [](double x) { return x < 0.0 ? 1.0 : 2.0; }, Box::interval(-1, 1), 400);
  const double x = 0.3;
  CHECK(convolve(p, ab, x, ab.a1) ==
        doctest::Approx(convolve(p, a, x, a.a1) + convolve(p, b, x, b.a1)).epsilon(1e-12));
  CHECK(convolve(p, ab, x, ab.a1) <= p.sup_value() * total_mass(ab) + 1e-14);
}

TEST_CASE("W1 in 1D: exact values") {
  const MassMeasure m = uniform_1d(0.0, 1.0, 1.0, 333);
  CHECK(w1_distance_1d(as_points(m), as_points(m)) == 0.0);

  Weighted1D d0, d1;
  d0.x = ArrayXd::Constant(1, 0.0);
  d0.w = ArrayXd::Constant(1, 1.0);
  d1.x = ArrayXd::Constant(1, 1.0);
  d1.w = ArrayXd::Constant(1, 1.0);
  CHECK(w1_distance_1d(d0, d1) == doctest::Approx(1.0).epsilon(1e-15));

  // uniform[0,1] vs uniform[0.5,1.5]: every label transports exactly 0.5
  const MassMeasure u = uniform_1d(0.0, 1.0, 1.0, 256);
  const MassMeasure v = uniform_1d(0.5, 1.5, 1.0, 256);
  CHECK(w1_distance_1d(as_points(u), as_points(v)) ==
        doctest::Approx(0.5).epsilon(1e-13));

  MassMeasure heavier = uniform_1d(0.0, 1.0, 2.0, 64);
  CHECK_THROWS_WITH_AS(w1_distance_1d(as_points(u), as_points(heavier)),
                       doctest::Contains("equal total masses"), EalignError);
  CHECK_THROWS_AS(w1_distance_1d(lump_density_2d([](double, double) { return 1.0; },
                                                 Box::rect(0, 1, 0, 1), 4, 4),
                                 ArrayXd(), u, u.a1),
                  EalignError);
}

TEST_CASE("W1: 1-Lipschitz duality lower bound (brute-force oracle)") {
  const MassMeasure u = uniform_1d(0.0, 1.0, 1.0, 256);
  const MassMeasure v = uniform_1d(0.5, 1.5, 1.0, 256);
  const double w1 = w1_distance_1d(as_points(u), as_points(v));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  const int knots = 41;
  for (int trial = 0; trial < 200; ++trial) {
    // random 1-Lipschitz piecewise-linear test function on [-0.5, 2.0]
    std::vector<double> fval(knots, 0.0);
    const double x0 = -0.5, dx = 2.5 / (knots - 1);
    for (int k = 1; k < knots; ++k) fval[k] = fval[k - 1] + slope(rng) * dx;
    auto f = [&](double x) {
      const double t = (x - x0) / dx;
      const int k = std::clamp(static_cast<int>(t), 0, knots - 2);
      return fval[k] + (t - k) * (fval[k + 1] - fval[k]);
    };
    double du = 0.0, dv = 0.0;
    for (Index i = 0; i < u.labels(); ++i) du += u.w[i] * f(u.a1[i]);
    for (Index i = 0; i < v.labels(); ++i) dv += v.w[i] * f(v.a1[i]);
    CHECK(std::abs(du - dv) <= w1 + 1e-12);
  }
}

TEST_CASE("W1: metric properties on random discrete measures") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), wgt(0.1, 1.0);
  auto random_measure = [&](Index n) {
    Weighted1D m;
    m.x.resize(n);
    m.w.resize(n);
    for (Index i = 0; i < n; ++i) {
      m.x[i] = pos(rng);
      m.w[i] = wgt(rng);
    }
    m.w /= m.w.sum();  // unit mass
    return m;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Weighted1D a = random_measure(17), b = random_measure(23), c = random_measure(9);
    const double ab = w1_distance_1d(a, b);
    const double ba = w1_distance_1d(b, a);
    CHECK(ab == ba);  // symmetry is exact (same breakpoint sweep)
    CHECK(ab >= 0.0);
    CHECK(ab <= w1_distance_1d(a, c) + w1_distance_1d(c, b) + 1e-12);
  }
}
