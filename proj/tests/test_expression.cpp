#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "specsolve/expression.hpp"

using namespace specsolve;

namespace {

using mp50 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

constexpr double eps = 2.220446049250313e-16;

double at(std::string_view text, double x) { return static_cast<double>(parse_expression(text)(x)); }

std::string parse_message(std::string_view text) {
  try {
    parse_expression(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    return e.what();
  }
  FAIL("no parse error for " << text);
  return {};
}

// random trees over the whole grammar; literals avoid values that print oddly
Expression random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 1);
  std::uniform_real_distribution<double> val(0, 50);
  switch (pick(rng)) {
    case 0: {
      const long double v = std::uniform_int_distribution<int>(0, 3)(rng) == 0
                                ? static_cast<long double>(std::uniform_int_distribution<int>(0, 9)(rng))
                                : static_cast<long double>(val(rng)) / 7.0L;
      return Expression::number(v);
    }
    case 1:
      return Expression::variable();
    case 2:
      return Expression::negate(random_tree(rng, depth - 1));
    case 3:
      return Expression::binary(Expression::Kind::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4:
      return Expression::binary(Expression::Kind::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5:
      return Expression::binary(Expression::Kind::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6:
      return Expression::binary(Expression::Kind::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7:
      return Expression::binary(Expression::Kind::Pow, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default: {
      const auto f = static_cast<Func>(std::uniform_int_distribution<int>(0, 8)(rng));
      return Expression::call(f, random_tree(rng, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(at("-x^2", 3) == -9);
  CHECK(at("2^3^2", 0) == 512);
  CHECK(at("2*-3", 0) == -6);
  CHECK(at("8/2/2", 0) == 2);
  CHECK(at("2-3-4", 0) == -5);
  CHECK(at("-2^-2", 0) == -0.25);
  CHECK(at("(1+2)*3", 0) == 9);
  CHECK(at("1+2*3^2", 0) == 19);
  CHECK(at("--x", 0.5) == 0.5);
  CHECK(at("x^3", -0.5) == -0.125);
  CHECK(at("  2 *\tx ", 0.25) == 0.5);
  CHECK(at("1.5e2 + .5 + 2.", 0) == 152.5);

  CHECK(parse_expression("-x^2") == parse_expression("-(x^2)"));
  CHECK(parse_expression("x^x^x") == parse_expression("x^(x^x)"));
  CHECK(parse_expression("x-x-x") == parse_expression("(x-x)-x"));
  CHECK_FALSE(parse_expression("x-x-x") == parse_expression("x-(x-x)"));
}

TEST_CASE("functions") {
  const double x = 0.3;
  CHECK(at("sin(x)", x) == doctest::Approx(std::sin(x)));
  CHECK(at("cos(x)", x) == doctest::Approx(std::cos(x)));
  CHECK(at("exp(x)", x) == doctest::Approx(std::exp(x)));
  CHECK(at("cosh(x)", x) == doctest::Approx(std::cosh(x)));
  CHECK(at("sinh(x)", x) == doctest::Approx(std::sinh(x)));
  CHECK(at("tan(x)", x) == doctest::Approx(std::tan(x)));
  CHECK(at("atan(x)", x) == doctest::Approx(std::atan(x)));
  CHECK(at("sqrt(x)", x) == doctest::Approx(std::sqrt(x)));
  CHECK(at("abs(-x)", x) == x);
  CHECK(at("1/(50000*x^2+1)", 0.01) == doctest::Approx(1.0 / 6.0));
  CHECK(parse_expression("cos(x) + 1").is_constant() == false);
  CHECK(parse_expression("sqrt(50000) * 2").is_constant());
}

TEST_CASE("syntax errors carry line:col and the expected set") {
  const std::string m = parse_message("2*+3");
  CHECK(m.find("1:3:") != std::string::npos);
  CHECK(m.find("expected one of") != std::string::npos);
  CHECK(m.find("number") != std::string::npos);
  CHECK(m.find("'('") != std::string::npos);
  CHECK(m.find("found '+'") != std::string::npos);

  CHECK(parse_message("sin(x").find("1:6:") != std::string::npos);
  CHECK(parse_message("sin(x").find("')'") != std::string::npos);
  CHECK(parse_message("2x").find("1:2:") != std::string::npos);
  CHECK(parse_message("").find("1:1:") != std::string::npos);
  CHECK(parse_message("").find("end of input") != std::string::npos);
  CHECK(parse_message("foo(x)").find("1:1:") != std::string::npos);
  CHECK(parse_message("y + 1").find("found 'y'") != std::string::npos);
  CHECK(parse_message("1 + (x").find("1:7:") != std::string::npos);
  CHECK(parse_message("1e999999").find("1:1:") != std::string::npos);
  CHECK(parse_message("3 $ 4").find("1:3:") != std::string::npos);
  CHECK(parse_message("+x").find("1:1:") != std::string::npos);
}

TEST_CASE("domain violations name the offending x") {
  auto domain_message = [](std::string_view text, long double x) {
    try {
      parse_expression(text)(x);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DomainError);
      return std::string(e.what());
    }
    FAIL("no domain error for " << text);
    return std::string();
  };
  CHECK(domain_message("1/x", 0).find("x = 0") != std::string::npos);
  CHECK(domain_message("sqrt(x)", -0.5).find("x = -0.5") != std::string::npos);
  CHECK(domain_message("x^0.5", -0.25).find("x = -0.25") != std::string::npos);
  CHECK(domain_message("exp(1/(x-0.5)^2)", 0.5).find("x = 0.5") != std::string::npos);
  CHECK(domain_message("exp(exp(exp(10*x)))", 1).find("x = 1") != std::string::npos);
}

TEST_CASE("pretty-print round trip over a 200-case corpus") {
  std::vector<Expression> corpus;
  for (const char* s : {"x^3", "100*sin(20000*x^2)", "1/(50000*x^2+1)", "cosh(x)", "cos(x)", "x^2", "x^4",
                        "exp(-(atan(sqrt(50000)*x)+atan(sqrt(50000)))/sqrt(50000))", "-x^2", "(-x)^2", "2^-x",
                        "-(x*x)", "x-(x-x)", "x/(x/x)", "(x^x)^x", "--x", "0.1", "1e-300", "12345678901234567890"})
    corpus.push_back(parse_expression(s));
  std::mt19937 rng(2024);
  while (corpus.size() < 200) corpus.push_back(random_tree(rng, 4));

  for (const Expression& e : corpus) {
    const std::string printed = e.to_string();
    CAPTURE(printed);
    const Expression back = parse_expression(printed);
    CHECK(back == e);
    CHECK(back.to_string() == printed);
  }
}

TEST_CASE("long double evaluation against a 50-digit tree walk") {
  // the example coefficients plus a few compositions; the error is measured relative
  // to the largest |value| on the sample set
  const char* texts[] = {"x^3",
                         "100*sin(20000*x^2)",
                         "1/(50000*x^2+1)",
                         "cosh(x)",
                         "cos(x)",
                         "x^2",
                         "x^4",
                         "exp(-(atan(sqrt(50000)*x)+atan(sqrt(50000)))/sqrt(50000))",
                         "sinh(3*x)*tan(x)/(2+x)",
                         "abs(x)^1.5 - sqrt(1 - x^2)",
                         "exp(sin(3*x))*(3*cos(3*x) + x^3)"};
  for (const char* t : texts) {
    const Expression e = parse_expression(t);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = -1.0 + 2.0 * i / 400.0 + (i % 3 == 0 ? 1e-3 : 0.0) * (i < 200 ? 1 : -1);
      const double got = static_cast<double>(e(x));
      const mp50 ref = e.eval<mp50>(mp50(x));
      worst = std::max(worst, static_cast<double>(abs(mp50(got) - ref)));
      scale = std::max(scale, static_cast<double>(abs(ref)));
    }
    CAPTURE(t);
    CHECK(worst <= 10 * eps * scale);
  }
}
