#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bshq/error.hpp"
#include "bshq/expression.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace bshq;

namespace {

// Random smooth expression in x, defined for x in (0, 2). Function and power
// arguments go through s/(s^2 + 1) so the result never oscillates faster than
// a central difference can resolve.
std::string squash(const std::string &s) {
  return "((" + s + ")/((" + s + ")^2 + 1))";
}

std::string random_expr(std::mt19937_64 &rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
  std::uniform_int_distribution<int> small(1, 5);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick(rng)) {
  case 0:
    return "x";
  case 1:
    return std::to_string(small(rng));
  case 2:
    return "(" + std::to_string(small(rng)) + "*x)";
  case 3:
    return "(" + sub() + " + " + sub() + ")";
  case 4:
    return "(" + sub() + " - " + sub() + ")";
  case 5:
    return "(" + sub() + " * " + sub() + ")";
  case 6:
    return "(" + sub() + " / ((" + sub() + ")^2 + 1))";
  case 7:
    return "sin(" + squash(sub()) + ")";
  case 8:
    return "cos(" + squash(sub()) + ")";
  case 9:
    return "exp(" + squash(sub()) + ")";
  case 10:
    return "sqrt((" + sub() + ")^2 + 1)";
  default:
    return squash(sub()) + "^" + std::to_string(small(rng) % 3 + 2);
  }
}

double at(const Expression &e, double x) {
  return eval_real(e, RealBindings{{"x", x}});
}

} // namespace

TEST_CASE("parse examples") {
  Expression e = parse_expression("2*A1");
  CHECK(e.kind() == NodeKind::Mul);
  CHECK(e.lhs().is_number(2.0));
  CHECK(e.rhs().kind() == NodeKind::Symbol);
  CHECK(e.rhs().name() == "A1");

  Expression d = parse_expression("r^2 - A1^2");
  REQUIRE(d.kind() == NodeKind::Sub);
  CHECK(d.lhs().kind() == NodeKind::Pow);
  CHECK(d.lhs().lhs().name() == "r");
  CHECK(d.lhs().exponent() == 2);
  CHECK(d.rhs().lhs().name() == "A1");

  CHECK(structurally_equal(parse_expression(" 2 *  A1 "), e));
}

TEST_CASE("syntax errors carry 1-based positions") {
  auto position = [](const std::string &text) -> std::size_t {
    try {
      parse_expression(text);
    } catch (const ParseError &err) {
      return err.position();
    }
    return 0;
  };
  CHECK(position("2*") == 3);
  CHECK(position("") == 1);
  CHECK(position("(A1 + 2") == 8);
  CHECK(position("A1 + * 3") == 6);
  CHECK(position("foo(A1)") == 4);
  CHECK(position("A1^x") == 4);
  CHECK(position("A1^2.5") == 4);
  CHECK(position("A1 A2") == 4);
  CHECK(position("3 $") == 3);
  CHECK(position("2^2^1") == 4);
  CHECK(position("sqrt A1") == 6);
  CHECK_THROWS_WITH_AS(parse_expression("2*"),
                       doctest::Contains("position 3"), ParseError);
}

TEST_CASE("round trip over a corpus of 50 expressions") {
  const auto &corpus = expression_corpus();
  REQUIRE(corpus.size() == 50);
  for (const auto &text : corpus) {
    CAPTURE(text);
    Expression e = parse_expression(text);
    std::string r = render(e);
    CAPTURE(r);
    Expression back = parse_expression(r);
    CHECK(structurally_equal(e, back));
    CHECK(render(back) == r);
  }
}

TEST_CASE("evaluation") {
  RealBindings b{{"A1", 3.0}, {"A2", 0.5}, {"r", 2.0}};
  CHECK(eval_real(parse_expression("2*A1"), b) == 6.0);
  CHECK(eval_real(parse_expression("r^2 - A2^2"), b) == doctest::Approx(3.75));
  CHECK(eval_real(parse_expression("A1^-1"), b) == doctest::Approx(1.0 / 3));
  // Unary minus binds tighter than '^'.
  CHECK(eval_real(parse_expression("-A1^2"), b) == 9.0);
  CHECK(eval_real(parse_expression("-(A1^2)"), b) == -9.0);

  Bindings c{{"chi1", complex(1.0, 2.0)}};
  complex j2 = eval_complex(parse_expression("(chi1 - conj(chi1))/(2*i)"), c);
  CHECK(j2.real() == doctest::Approx(2.0));
  CHECK(j2.imag() == doctest::Approx(0.0));

  CHECK_THROWS_AS(eval_real(parse_expression("A3"), b), EvaluationError);
  CHECK_THROWS_AS(eval_real(parse_expression("sqrt(-A1)"), b),
                  EvaluationError);
  CHECK_THROWS_AS(eval_real(parse_expression("A1/(A1 - 3)"), b),
                  EvaluationError);
  CHECK_THROWS_AS(eval_real(parse_expression("2*i"), b), EvaluationError);
}

TEST_CASE("derivatives match central differences on random expressions") {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> xs(0.2, 1.8);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = random_expr(rng, 4);
    CAPTURE(text);
    Expression f = parse_expression(text);
    Expression df = differentiate(f, "x");
    for (int j = 0; j < 3; ++j) {
      double x = xs(rng);
      double fd = oracle::central_difference([&](double t) { return at(f, t); },
                                             x, 1e-3);
      double exact = at(df, x);
      CAPTURE(x);
      CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
      ++checked;
    }
  }
  CHECK(checked == 600);
}

TEST_CASE("differentiation is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(0.2, 1.8), ks(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Expression f = parse_expression(random_expr(rng, 3));
    Expression g = parse_expression(random_expr(rng, 3));
    double a = ks(rng), b = ks(rng);
    Expression comb = Expression::add(
        Expression::mul(Expression::number(a), f),
        Expression::mul(Expression::number(b), g));
    Expression lhs = differentiate(comb, "x");
    Expression df = differentiate(f, "x"), dg = differentiate(g, "x");
    double x = xs(rng);
    double expect = a * at(df, x) + b * at(dg, x);
    CHECK(at(lhs, x) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("symbolic derivatives of profiles") {
  Expression d = differentiate(parse_expression("r^2 - A1^2"), "A1");
  CHECK(eval_real(d, RealBindings{{"A1", 1.5}, {"r", 2.0}}) == -3.0);
  CHECK(eval_real(differentiate(parse_expression("2*A1"), "A1"), {}) == 2.0);
  CHECK_THROWS_AS(differentiate(parse_expression("conj(chi1)"), "A1"),
                  ModelError);
}

TEST_CASE("affine forms") {
  RealBindings k{{"r", 2.5}, {"hbar", 1.0}};
  AffineForm f = affine_form(parse_expression("2*A1 - A2/2 + r"), 2, k);
  REQUIRE(f.coefficients.size() == 2);
  CHECK(f.coefficients[0] == 2.0);
  CHECK(f.coefficients[1] == -0.5);
  CHECK(f.constant == 2.5);
  CHECK_THROWS_AS(affine_form(parse_expression("A1*A2"), 2, k), ModelError);
  CHECK_THROWS_AS(affine_form(parse_expression("A1^2"), 1, k), ModelError);
  CHECK_THROWS_AS(affine_form(parse_expression("sin(A1)"), 1, k), ModelError);
  CHECK_THROWS_AS(affine_form(parse_expression("A3"), 2, k), ModelError);
  CHECK_THROWS_AS(affine_form(parse_expression("q*A1"), 1, k), ModelError);
}

TEST_CASE("first-degree observables") {
  ObservableExpr o =
      split_observable(parse_expression("A1 + A2*chi1 + 3*conj(chi2)"), 2);
  CHECK(eval_real(o.diagonal, RealBindings{{"A1", 4.0}}) == 4.0);
  REQUIRE(o.lowering.count(0) == 1);
  REQUIRE(o.raising.count(1) == 1);
  CHECK(eval_real(o.lowering.at(0), RealBindings{{"A2", 5.0}}) == 5.0);
  CHECK(eval_real(o.raising.at(1), {}) == 3.0);

  CHECK_THROWS_WITH_AS(split_observable(parse_expression("chi1*chi1"), 1),
                       doctest::Contains("first-degree only"), ModelError);
  CHECK_THROWS_AS(split_observable(parse_expression("chi1*conj(chi1)"), 1),
                  ModelError);
  CHECK_THROWS_AS(split_observable(parse_expression("chi1^2"), 1), ModelError);
  CHECK_THROWS_AS(split_observable(parse_expression("chi3"), 2), ModelError);
  CHECK_THROWS_AS(split_observable(parse_expression("sin(chi1)"), 1),
                  ModelError);
}

TEST_CASE("symbol helpers") {
  CHECK(action_axis("A12") == 12u);
  CHECK_FALSE(action_axis("A"));
  CHECK_FALSE(action_axis("A0"));
  CHECK_FALSE(action_axis("Ab"));
  CHECK(chi_axis("chi2") == 2u);
  CHECK(action_symbol(3) == "A3");
  CHECK(chi_symbol(1) == "chi1");
  CHECK(symbols_of(parse_expression("A1*r + sin(alpha)")) ==
        std::set<std::string>{"A1", "alpha", "r"});
}
