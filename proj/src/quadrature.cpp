#include "ealign/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ealign {

namespace {

// Kronrod-15 abscissae/weights on [-1,1]; the embedded Gauss-7 rule uses the
// odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double result_gauss = fc * kWg[3];
  double result_kronrod = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    result_kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) result_gauss += kWg[j / 2] * fsum;
  }
  return {a, b, result_kronrod * h, std::abs((result_kronrod - result_gauss) * h)};
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  struct Item {
    Panel p;
    int depth;
  };
  std::vector<Item> stack;
  stack.push_back({gk15(f, a, b), 0});
  out.evaluations = 15;
  double total = stack.back().p.value;
  double total_err = stack.back().p.err;
  std::vector<Panel> done;
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const double tol = std::max(abs_tol, rel_tol * std::abs(total)) *
                       std::abs(it.p.b - it.p.a) / std::abs(b - a);
    if (it.p.err <= tol || it.depth >= max_depth) {
      if (it.p.err > tol) out.converged = false;
      done.push_back(it.p);
      continue;
    }
    const double m = 0.5 * (it.p.a + it.p.b);
    Panel left = gk15(f, it.p.a, m), right = gk15(f, m, it.p.b);
    out.evaluations += 30;
    total += left.value + right.value - it.p.value;
    total_err += left.err + right.err - it.p.err;
    stack.push_back({left, it.depth + 1});
    stack.push_back({right, it.depth + 1});
  }
  double s = 0.0, comp = 0.0, err = 0.0;
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const Panel& p : done) {
    const double t = s + p.value;
    comp += (std::abs(s) >= std::abs(p.value)) ? (s - t) + p.value : (p.value - t) + s;
    s = t;
    err += p.err;
  }
  out.value = s + comp;
  out.abs_error = err;
  (void)total;
  (void)total_err;
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  const QuadResult r = integrate_gk(f, a, b, rel_tol, abs_tol);
  if (!r.converged)
    throw EalignError("quadrature did not converge: achieved abs error " +
                      std::to_string(r.abs_error) + " on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
  return r.value;
}

}  // namespace ealign
