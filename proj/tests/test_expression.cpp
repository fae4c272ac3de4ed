#include "doctest.h"
#include "pks/expression.hpp"

using namespace pks;

TEST_CASE("arithmetic and precedence") {
  CHECK(parse_number("1 + 2 * 3") == 7);
  CHECK(parse_number("(1 + 2) * 3") == 9);
  CHECK(parse_number("-2^2") == -4);
  CHECK(parse_number("2^3^2") == 512);
  CHECK(parse_number("10 / 4") == 2.5);
  CHECK(parse_number("min(3, 1, 2) + max(1, 5)") == 6);
  CHECK(parse_number("exp(0) + sqrt(16) + abs(-2)") == 7);
}

TEST_CASE("functions of s with indicators") {
  const auto f = parse_function("0.4*ind(s>0) + 0.25*(s==0)");
  CHECK(f(1.0) == doctest::Approx(0.4));
  CHECK(f(0.0) == doctest::Approx(0.25));
  CHECK(f(-1.0) == 0.0);
  const auto g = parse_function("s >= 0 && s <= 1 || s == -3");
  CHECK(g(0.5) == 1);
  CHECK(g(2) == 0);
  CHECK(g(-3) == 1);
  CHECK(parse_function("!(s != 2)")(2) == 1);
}

TEST_CASE("errors name the column") {
  CHECK_THROWS_AS(parse_function("1 +"), ParameterError);
  CHECK_THROWS_AS(parse_function("foo(s)"), ParameterError);
  CHECK_THROWS_AS(parse_function("(s"), ParameterError);
  CHECK_THROWS_AS(parse_function("min(s)"), ParameterError);
  CHECK_THROWS_AS(parse_number("s + 1"), ParameterError);
  try {
    parse_function("1 + * 2");
    FAIL("expected an error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}
