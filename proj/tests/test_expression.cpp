#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "gsisio/errors.hpp"
#include "gsisio/expression.hpp"
#include "support.hpp"

using namespace gsisio;
using testing_support::Gen;

namespace {

// Random source text paired with a closure computing the same value directly.
struct Sample {
  std::string text;
  std::function<double(const Vector&, double)> value;
};

std::string literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Sample random_expr(Gen& g, std::size_t n, int depth) {
  if (depth == 0 || g.coin(0.25)) {
    switch (g.index(0, 3)) {
      case 0: {
        const double c = std::round(g.uniform(0, 5) * 1000) / 1000;
        return {literal(c), [c](const Vector&, double) { return c; }};
      }
      case 1: return {"pi", [](const Vector&, double) { return std::numbers::pi; }};
      case 2: return {"k", [](const Vector&, double k) { return k; }};
      default: {
        const std::size_t i = g.index(0, n - 1);
        return {"x" + std::to_string(i + 1), [i](const Vector& x, double) { return x[i]; }};
      }
    }
  }
  const std::size_t kind = g.index(0, 8);
  if (kind <= 4) {
    const Sample a = random_expr(g, n, depth - 1), b = random_expr(g, n, depth - 1);
    auto fa = a.value, fb = b.value;
    switch (kind) {
      case 0: return {"(" + a.text + ") + (" + b.text + ")", [fa, fb](const Vector& x, double k) { return fa(x, k) + fb(x, k); }};
      case 1: return {"(" + a.text + ") - (" + b.text + ")", [fa, fb](const Vector& x, double k) { return fa(x, k) - fb(x, k); }};
      case 2: return {"(" + a.text + ")*(" + b.text + ")", [fa, fb](const Vector& x, double k) { return fa(x, k) * fb(x, k); }};
      case 3:
        // Keep denominators away from zero.
        return {"(" + a.text + ") / (2 + tanh(" + b.text + "))",
                [fa, fb](const Vector& x, double k) { return fa(x, k) / (2 + std::tanh(fb(x, k))); }};
      default: return {"-(" + a.text + ")", [fa](const Vector& x, double k) { return -fa(x, k); }};
    }
  }
  const Sample a = random_expr(g, n, depth - 1);
  auto fa = a.value;
  switch (kind) {
    case 5: return {"sin(" + a.text + ")", [fa](const Vector& x, double k) { return std::sin(fa(x, k)); }};
    case 6: return {"cos(" + a.text + ")", [fa](const Vector& x, double k) { return std::cos(fa(x, k)); }};
    case 7: return {"tanh(" + a.text + ")", [fa](const Vector& x, double k) { return std::tanh(fa(x, k)); }};
    default:
      return {"exp(tanh(" + a.text + "))", [fa](const Vector& x, double k) { return std::exp(std::tanh(fa(x, k))); }};
  }
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string error_of(const std::string& src, std::size_t n) {
  try {
    parse_expression(src, n);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reference drift expression") {
  const Expression e = parse_expression("0.6*x1 - 0.12*x2 + 1.1*sin(0.3*x2 - 0.2*x1)", 2);
  CHECK(e.evaluate(Vector{0, 0}) == 0.0);
  const double x1 = 0.7, x2 = -1.3;
  CHECK(e.evaluate(Vector{x1, x2}) == doctest::Approx(0.6 * x1 - 0.12 * x2 + 1.1 * std::sin(0.3 * x2 - 0.2 * x1)));
}

TEST_CASE("parse errors carry a position") {
  const std::string range = error_of("x3", 2);
  CHECK(range.find("out of range") != std::string::npos);
  CHECK(range.find("column 1") != std::string::npos);
  const std::string eoi = error_of("sin(x1", 2);
  CHECK(eoi.find("column 7") != std::string::npos);
  CHECK(error_of("x1 + y", 2).find("unknown identifier 'y'") != std::string::npos);
  CHECK(error_of("x1 + y", 2).find("column 6") != std::string::npos);
  CHECK_FALSE(error_of("x1 / 0", 2).empty());
  CHECK_FALSE(error_of("x1 / 0.0", 2).empty());
  CHECK_FALSE(error_of("", 1).empty());
  CHECK_FALSE(error_of("x1 x2", 2).empty());
  CHECK_FALSE(error_of("x0", 2).empty());
  CHECK_FALSE(error_of("1.2.3", 2).empty());
  CHECK_FALSE(error_of("sin x1", 2).empty());
  CHECK_FALSE(error_of("k", 2).empty());
  CHECK_FALSE(error_of("(x1", 2).empty());
  CHECK_FALSE(error_of("x1 $ 2", 2).empty());
  CHECK(error_of("x1 / (0 + 1)", 2).empty());
}

TEST_CASE("precedence and associativity") {
  const Vector x{2.0, 3.0};
  auto ev = [&](const char* s) { return parse_expression(s, 2).evaluate(x); };
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("(1 + 2) * 3") == 9.0);
  CHECK(ev("8 - 4 - 2") == 2.0);
  CHECK(ev("16 / 4 / 2") == 2.0);
  CHECK(ev("-x1 * x2") == -6.0);
  CHECK(ev("- -x1") == 2.0);
  CHECK(ev("+x1 - -x2") == 5.0);
  CHECK(ev("2 * -x2") == -6.0);
  CHECK(ev("x1 - x2 * x1 / x2") == doctest::Approx(0.0));
  CHECK(ev("1e-3 * 1E3") == doctest::Approx(1.0));
  CHECK(ev(".5 + 1.") == 1.5);
  CHECK(ev("exp(0) + cos(0) + tanh(0)") == 2.0);
  CHECK(ev("  sin ( pi / 2 ) ") == doctest::Approx(1.0));
}

TEST_CASE("constants and time") {
  ExpressionSymbols sym{1, true, {{"a", 1.5}, {"eps", 1e-6}}};
  const Expression e = Expression::parse("a*sin(0.1*k) + x1 - eps", sym);
  CHECK(e.evaluate(Vector{1.0}, 5.0) == doctest::Approx(1.5 * std::sin(0.5) + 1.0 - 1e-6));
  const Expression d = Expression::parse("2*cos(k)", ExpressionSymbols{0, true, {}});
  CHECK(d.evaluate(Vector{}, 0.0) == 2.0);
  CHECK_THROWS_AS(parse_expression("x2", 2).evaluate(Vector{1.0}), DimensionError);
}

TEST_CASE("round trip through the printer") {
  Gen g(71);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = g.index(1, 4);
    const Sample s = random_expr(g, n, static_cast<int>(g.index(1, 5)));
    ExpressionSymbols sym{n, true, {}};
    const Expression e = Expression::parse(s.text, sym);
    const Expression back = Expression::parse(e.to_string(), sym);
    CHECK(back.to_string() == e.to_string());
    int bad = 0;
    for (int p = 0; p < 1000; ++p) {
      const Vector x = g.vector(n, -3, 3);
      const double k = static_cast<double>(g.index(0, 200));
      const double v = e.evaluate(x, k);
      if (!close(back.evaluate(x, k), v, 1e-12) || !close(v, s.value(x, k), 1e-12)) ++bad;
    }
    CHECK_MESSAGE(bad == 0, s.text);
  }
}
