#include <doctest.h>
#include <cmath>

#include "capgeo/errors.hpp"
#include "capgeo/expr.hpp"

using capgeo::Expr;

TEST_CASE("expression parsing and evaluation") {
    CHECK(Expr::parse("1 + 2*3").eval(0) == doctest::Approx(7.0));
    CHECK(Expr::parse("-(x^2+y^2)/2").eval(0.3, 0.1) == doctest::Approx(-0.05));
    CHECK(Expr::parse("sin(pi/2)").eval(0) == doctest::Approx(1.0));
    CHECK(Expr::parse("exp(-x)*cos(y)").eval(1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(Expr::parse("2^3^1").eval(0) == doctest::Approx(8.0));
    CHECK(Expr::parse("0.2581988897471611*u").eval(0, 0, 0.8) ==
          doctest::Approx(0.2581988897471611 * 0.8));
}

TEST_CASE("expression errors") {
    CHECK_THROWS_AS(Expr::parse("1 +"), capgeo::ConfigError);
    CHECK_THROWS_AS(Expr::parse("foo(2)"), capgeo::ConfigError);
    CHECK_THROWS_AS(Expr::parse("(1"), capgeo::ConfigError);
}

TEST_CASE("expression copies are independent") {
    Expr a = Expr::parse("x + 1");
    Expr b = a;
    CHECK(b.eval(2.0) == doctest::Approx(3.0));
    CHECK(a.eval(4.0) == doctest::Approx(5.0));
}
