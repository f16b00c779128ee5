#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/stability.hpp"

#include <cmath>

using namespace ealign;

namespace {

Scenario oracle(double eps, Index n = 128) {
  OracleParams p;
  p.n_labels = n;
  p.u0_scale = 0.9;
  p.perturb_eps = eps;
  return oracle_scenario(p);
}

IntegratorConfig cfg() {
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  c.abs_tol = 1e-12;
  return c;
}

}  // namespace

TEST_CASE("identical scenarios: every gap is exactly zero") {
  const StabilityReport rep = run_pair(oracle(0.0), oracle(0.0), cfg());
  CHECK(rep.passed);
  CHECK(rep.w1_m0 == 0.0);
  CHECK(rep.du0_inf == 0.0);
  CHECK(rep.gap_x.abs().maxCoeff() == 0.0);
  CHECK(rep.gap_v.abs().maxCoeff() == 0.0);
  CHECK(rep.w1_limit == 0.0);
}

TEST_CASE("constant-kernel closed form bounds the trajectory gap") {
  const double eps = 1e-3;
  const StabilityReport rep = run_pair(oracle(0.0), oracle(eps), cfg());
  CHECK(rep.passed);
  // X' - X'' = (u0' - u0'')(1 - e^{-kappa M0 t}) / (kappa M0); ‖ψ‖∞ = 1
  CHECK(rep.gap_x.maxCoeff() <= eps * (1.0 + 1e-6));
  CHECK(rep.gap_x.maxCoeff() >= 0.5 * eps);  // the bound is nearly saturated
  // ‖Δu₀‖∞ = ε · max |cos(π αᵢ)| over the midpoint labels
  CHECK(rep.du0_inf == doctest::Approx(eps).epsilon(1e-3));
  CHECK(rep.w1_m0 == 0.0);  // same labels, same weights

  // exponential decay of the velocity gap: gap_v e^{ct} stays bracketed
  for (Index k = 0; k < rep.times.size(); ++k) {
    const double lhs = rep.gap_v[k] * std::exp(rep.k.c * rep.times[k]);
    CHECK(lhs <= rep.k.C * (rep.w1_m0 + rep.du0_inf) * (1.0 + 1e-9) + 1e-6);
  }
  // W1 chain: W1(m_t) <= env * W1(m_0) + M0 * gap_x at recorded times (M0 = 1)
  for (Index k = 0; k < rep.times.size(); ++k)
    CHECK(rep.w1_t[k] <= rep.k.envelope_grad_x * rep.w1_m0 + rep.gap_x[k] + 1e-6);
}

TEST_CASE("halving the perturbation halves the limiting W1 within 10%") {
  const StabilityReport r1 = run_pair(oracle(1e-3, 64), oracle(0.0, 64), cfg());
  const StabilityReport r2 = run_pair(oracle(5e-4, 64), oracle(0.0, 64), cfg());
  CHECK(r1.w1_limit / r2.w1_limit == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("constants materialize from the chain; a = 0 branch") {
  FlockingConstants fc;
  fc.a = 0.0;
  fc.b = 0.5;
  fc.kernel_floor = 0.5;
  fc.diam_bound = 2.0;
  const StabilityConstants k = stability_constants(fc, 1.0, 1.0);
  CHECK(k.amplification == 1.0);
  CHECK(k.C_X == 2.0);            // max(1, 1/b)
  CHECK(k.C_V == 1.0);
  CHECK(k.envelope_grad_x == 3.0);  // 1 + g/b
  CHECK(k.C_W == 5.0);
  CHECK(k.C == 5.0);
  CHECK(k.c == 0.25);

  FlockingConstants fp = fc;
  fp.a = 4.0;
  const StabilityConstants kp = stability_constants(fp, 1.0, 1.0);
  CHECK(kp.amplification == doctest::Approx(std::exp(8.0)).epsilon(1e-12));
  CHECK(kp.C_X == doctest::Approx(std::exp(8.0)).epsilon(1e-12));  // K·max(√a,1)/√a
  CHECK(kp.C_V == doctest::Approx(2.0 * std::exp(8.0)).epsilon(1e-12));
  CHECK(kp.C >= kp.C_V);
}

TEST_CASE("preconditions: label grids and masses must match") {
  CHECK_THROWS_WITH_AS(run_pair(oracle(0.0, 64), oracle(0.0, 128), cfg()),
                       doctest::Contains("label grid"), EalignError);
}
