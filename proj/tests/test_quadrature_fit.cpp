#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/common.hpp"
#include "ealign/fit.hpp"
#include "ealign/parallel.hpp"
#include "ealign/quadrature.hpp"

#include <cmath>

using namespace ealign;

TEST_CASE("adaptive Gauss-Kronrod on reference integrals") {
  CHECK(integrate([](double y) { return 1.0 / std::sqrt(1.0 + y * y); }, 0.0, 1.0) ==
        doctest::Approx(0.8813735870195430).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-13));
  // compactly supported C∞ bump (flat exponential tails stress the subdivision)
  auto bump = [](double x) {
    return std::abs(x) < 0.5 ? std::exp(-1.0 / (0.25 - x * x)) : 0.0;
  };
  CHECK(integrate(bump, -0.5, 0.5, 1e-13, 1e-16) ==
        doctest::Approx(0.0070298584066096562).epsilon(1e-11));
  CHECK(integrate(bump, 0.0, 0.0) == 0.0);
  // orientation
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
        doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("line fit and decay-rate fit") {
  ArrayXd x(6), y(6);
  for (Index i = 0; i < 6; ++i) {
    x[i] = 0.5 * static_cast<double>(i);
    y[i] = 3.0 - 1.25 * x[i];
  }
  const LineFit lf = fit_line(x, y);
  CHECK(lf.valid);
  CHECK(lf.slope == doctest::Approx(-1.25).epsilon(1e-13));
  CHECK(lf.intercept == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(lf.residual <= 1e-13);

  ArrayXd t(3), a(3);
  t << 1.0, 2.0, 4.0;
  a = (-0.7 * t).exp() * 2.0;
  const TailFit tf = fit_decay_rate(t, a);
  CHECK(tf.valid);
  CHECK(tf.rate == doctest::Approx(0.7).epsilon(1e-12));

  ArrayXd bad = a;
  bad[2] = bad[1] * 2.0;  // non-monotone tail
  CHECK_FALSE(fit_decay_rate(t, bad).valid);
  bad[2] = 0.0;  // non-positive tail
  CHECK_FALSE(fit_decay_rate(t, bad).valid);
}

TEST_CASE("chunked reductions are bit-identical at any worker count") {
  const Index n = 10007;
  ArrayXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = std::sin(0.001 * static_cast<double>(i)) * 1e-3;
  auto run = [&] {
    return reduce_chunks(n,
                         [&](Index b, Index e) { return blocked_sum(v.segment(b, e - b)); });
  };
  set_worker_count(1);
  const double serial = run();
  for (int workers : {2, 3, 8}) {
    set_worker_count(workers);
    CHECK(run() == serial);  // fixed chunk decomposition and combine order
  }
  set_worker_count(1);
  CHECK(serial == doctest::Approx(blocked_sum(v)).epsilon(1e-15));
}
