#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "exitwise/drift_expr.hpp"
#include "exitwise/errors.hpp"

using namespace exitwise;

TEST_CASE("evaluation follows precedence") {
  CHECK(Expr::parse("1 + 2 * 3")(0.0) == 7.0);
  CHECK(Expr::parse("(1 + 2) * 3")(0.0) == 9.0);
  CHECK(Expr::parse("2 ^ 3 ^ 2")(0.0) == 512.0);  // right associative
  CHECK(Expr::parse("-x ^ 2")(3.0) == -9.0);
  CHECK(Expr::parse("8 / 4 / 2")(0.0) == 1.0);
  CHECK(Expr::parse("10 - 4 - 3")(0.0) == 3.0);
  CHECK(Expr::parse("2 + sin(x)")(0.5) == doctest::Approx(2.0 + std::sin(0.5)));
  CHECK(Expr::parse("-2*x")(1.5) == -3.0);
  CHECK(Expr::parse("exp(-x^2/2) * cos(pi*x)")(0.3) == doctest::Approx(std::exp(-0.045) * std::cos(M_PI * 0.3)));
  CHECK(Expr::parse("e")(0.0) == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse("1.5e-1 * x")(2.0) == doctest::Approx(0.3));
  CHECK(Expr::parse("  +x  ")(4.0) == 4.0);
}

TEST_CASE("symbolic derivative matches finite differences") {
  const char* cases[] = {"2 + sin(x)", "-2*x", "x^3 - 4*x", "exp(x) * cos(x)", "1 / (2 + x^2)", "sin(cos(x))",
                         "x^0.5 + 3", "-(x - 1)^2", "exp(-x)"};
  for (const char* text : cases) {
    const Expr f = Expr::parse(text);
    const Expr df = f.derivative();
    for (double x : {0.3, 0.9, 1.7}) {
      const double h = 1e-5;
      const double fd = (f(x + h) - f(x - h)) / (2 * h);
      INFO(text, " at ", x);
      CHECK(df(x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  CHECK(Expr::parse("3").derivative()(1.0) == 0.0);
  CHECK(Expr::variable().derivative()(5.0) == 1.0);
  CHECK(Expr::constant(2.5)(9.0) == 2.5);
}

TEST_CASE("malformed expressions report the column") {
  const char* bad[] = {"", "1 +", "sin x", "(x", "x)", "x ^ x", "foo(x)", "2 $ 3", "**", "y"};
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(Expr::parse(text), ParseError);
  }
  try {
    Expr::parse("1 + $");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

TEST_CASE("printing round-trips") {
  for (const char* text : {"2 + sin(x)", "x^2 * exp(-x)", "-(1 - x) / 3"}) {
    const Expr a = Expr::parse(text);
    const Expr b = Expr::parse(a.str());
    for (double x : {-0.7, 0.2, 1.1}) CHECK(b(x) == doctest::Approx(a(x)).epsilon(1e-15));
  }
}
