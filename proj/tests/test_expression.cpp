#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/expression.hpp"

#include <cmath>

using namespace ealign;

TEST_CASE("arithmetic, precedence, variables") {
  CHECK(Expression("1 + 2*3")(0) == 7.0);
  CHECK(Expression("(1 + 2)*3")(0) == 9.0);
  CHECK(Expression("2^3^2")(0) == 512.0);  // right-associative
  CHECK(Expression("-x^2")(3.0) == -9.0);
  CHECK(Expression("a1 - a2")(5.0, 2.0) == 3.0);
  CHECK(Expression("x*y")(4.0, 0.25) == 1.0);
  CHECK(Expression("pi")(0) == doctest::Approx(M_PI));
}

TEST_CASE("functions") {
  CHECK(Expression("sin(pi/2)")(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Expression("-0.3*sin(pi*x)/pi")(0.5) == doctest::Approx(-0.3 / M_PI));
  CHECK(Expression("max(0, x)")(-2.0) == 0.0);
  CHECK(Expression("min(x, 1) + abs(y)")(3.0, -2.0) == 3.0);
  CHECK(Expression("exp(log(x))")(1.7) == doctest::Approx(1.7).epsilon(1e-14));
  CHECK(Expression("pow(x, 3)")(2.0) == 8.0);
  CHECK(Expression("asinh(1)")(0) == doctest::Approx(0.8813735870195430));
}

TEST_CASE("parse errors carry position context") {
  CHECK_THROWS_WITH_AS(Expression("foo(1)"), doctest::Contains("unknown"), EalignError);
  CHECK_THROWS_WITH_AS(Expression("1 + "), doctest::Contains("unexpected end"),
                       EalignError);
  CHECK_THROWS_WITH_AS(Expression("(1+2"), doctest::Contains("expected ')'"),
                       EalignError);
  CHECK_THROWS_WITH_AS(Expression("1 2"), doctest::Contains("trailing"), EalignError);
  CHECK_THROWS_AS(Expression("min(1)"), EalignError);
}
