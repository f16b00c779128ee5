#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/geometry.hpp"

#include <cmath>
#include <random>

using namespace ealign;

namespace {

// middle-thirds Cantor interval endpoints down to the given depth
std::vector<double> cantor_thirds_endpoints(int depth) {
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  for (int j = 0; j < depth; ++j) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [lo, hi] : intervals) {
      const double third = (hi - lo) / 3.0;
      next.emplace_back(lo, lo + third);
      next.emplace_back(hi - third, hi);
    }
    intervals = std::move(next);
  }
  std::vector<double> pts;
  for (const auto& [lo, hi] : intervals) {
    pts.push_back(lo);
    pts.push_back(hi);
  }
  return pts;
}

}  // namespace

TEST_CASE("cover counts: exact greedy sweep") {
  const std::vector<double> pts = {0.0, 0.1, 0.2, 0.9, 1.0};
  CHECK(cover_count_1d(pts, 0.5) == 1);   // one interval of length 1 covers all
  CHECK(cover_count_1d(pts, 0.11) == 2);  // {0, .1, .2} and {.9, 1}
  CHECK(cover_count_1d(pts, 0.05) == 3);  // {0, .1}, {.2}, {.9, 1}
  CHECK(cover_count_1d(pts, 1e-6) == 5);
  // N(r) nonincreasing in r
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> rnd(200);
  for (double& x : rnd) x = u(rng);
  std::sort(rnd.begin(), rnd.end());
  Index prev = 0;
  for (double r = 1e-4; r < 1.0; r *= 2.0) {
    const Index n = cover_count_1d(rnd, r);
    if (prev > 0) CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("box dimension: degenerate, full interval, classical Cantor set") {
  DimensionEstimate single = box_dimension({0.42}, RadiiSchedule{});
  CHECK(single.estimate == 0.0);

  std::vector<double> grid(1025);
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 1024.0;
  const DimensionEstimate full =
      box_dimension(grid, RadiiSchedule{}, 1.0 / 1024.0, 0.1);
  CHECK(std::abs(full.estimate - 1.0) <= 0.05);

  const std::vector<double> cpts = cantor_thirds_endpoints(10);
  const DimensionEstimate cd =
      box_dimension(cpts, RadiiSchedule{}, std::pow(3.0, -10), 0.1);
  CHECK(std::abs(cd.estimate - std::log(2.0) / std::log(3.0)) <= 0.05);
  CHECK(cd.fit.valid);
  CHECK(cd.radii.size() >= 5);

  // window too narrow: fewer than 5 usable radii
  CHECK_THROWS_WITH_AS(box_dimension(grid, RadiiSchedule{0.1, 3}, 0.0, 0.0),
                       doctest::Contains("fewer than 5"), EalignError);
}

TEST_CASE("local dimension: atoms, Lebesgue points, far-mass invariance") {
  Decomp1D d;
  const Index n = 20001;
  d.x.resize(n);
  d.w.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.x[i] = -1.0 + 2.0 * static_cast<double>(i) / (n - 1);
    d.w[i] = 2.0 / n;
  }
  d.total = 2.0;
  const RadiiSchedule sched{1e-1, 8};

  // interior Lebesgue point of a uniform density: slope ~ 1
  const DimensionEstimate interior = local_dimension(d, 0.2345, sched);
  CHECK(std::abs(interior.estimate - 1.0) <= 0.05);

  // an atom dominates: slope ~ 0
  Decomp1D with_atom = d;
  with_atom.atoms.push_back({0.2345, 0.0, 5.0});
  const DimensionEstimate at_atom = local_dimension(with_atom, 0.2345, sched);
  CHECK(std::abs(at_atom.estimate) <= 0.05);

  // adding mass far away changes nothing
  Decomp1D far = d;
  far.atoms.push_back({50.0, 0.0, 3.0});
  const DimensionEstimate invariant = local_dimension(far, 0.2345, sched);
  CHECK(invariant.estimate == interior.estimate);

  // outside the support
  CHECK_THROWS_WITH_AS(local_dimension(d, 10.0, sched), doctest::Contains("outside"),
                       EalignError);

  // ball masses are nondecreasing in r
  double prev = 0.0;
  for (double r = 1e-4; r < 1.0; r *= 2.0) {
    const double m = ball_mass(d, 0.5, r);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("cantor predictions") {
  const CantorPrediction cp = cantor_prediction(0.3, 0.3, 1);
  CHECK(cp.dim == doctest::Approx(0.2878583212467225).epsilon(1e-15));
  CHECK(cp.ck_ceiling == 0.5);
  CHECK(cp.smoothness_k == 1);  // beta = gamma ⇒ C¹ exactly

  // beta = gamma^k gives dim = ln2 / ((k+1) ln(1/gamma)) < 1/(k+1)
  for (int k : {1, 2, 3}) {
    const double gamma = 0.3;
    const double beta = std::pow(gamma, k);
    const CantorPrediction c = cantor_prediction(gamma, beta, k);
    CHECK(c.dim ==
          doctest::Approx(std::log(2.0) / ((k + 1) * std::log(1.0 / gamma))).epsilon(1e-14));
    CHECK(c.dim < 1.0 / (k + 1));
  }
  // beta*gamma → 0 drives the dimension to 0
  CHECK(cantor_prediction(0.01, 0.01, 1).dim < 0.08);
  CHECK_THROWS_AS(cantor_prediction(0.5, 0.3, 1), EalignError);
  CHECK_THROWS_AS(cantor_prediction(0.3, 1.5, 1), EalignError);
}

TEST_CASE("frostman ratio on a two-atom example") {
  std::vector<Atom> mu = {{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}};
  // s = 1: ratio maximized at the smallest radius capturing one atom
  const double worst = frostman_ratio(mu, 1.0, 0.25, 0.5);
  CHECK(worst == doctest::Approx(1.0 / 0.25).epsilon(1e-12));
}
