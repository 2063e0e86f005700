#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "charpent/expr.hpp"
#include "support.hpp"

using namespace charpent;
using namespace charpent::expr;

TEST_CASE("parse and evaluate basics") {
  CHECK(eval_at(parse("x1^2 + 3*x2"), 2.0, 1.0) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(std::fabs(eval_at(parse("sin(pi)"), 0.0)) <= 1e-15);
  CHECK(eval_at(parse("exp(x1)"), 0.0) == 1.0);
  CHECK(eval_at(parse("x^2"), 3.0) == 9.0);  // x aliases x1
  CHECK(eval_at(parse("2^-3"), 0.0) == doctest::Approx(0.125));
  CHECK(eval_at(parse("2^3^2"), 0.0) == doctest::Approx(512.0));  // right-assoc
}

TEST_CASE("unary minus binds below the power") {
  CHECK(eval_at(parse("-x1^2"), 3.0) == -9.0);
  CHECK(eval_at(parse("(-x1)^2"), 3.0) == 9.0);
  CHECK(eval_at(parse("--x1"), 5.0) == 5.0);
}

TEST_CASE("parse errors carry 0-based offsets") {
  CHECK_THROWS_AS(parse("x1 + + 2"), ParseError);
  try {
    parse("x1 + + 2");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
  try {
    parse("foo(2)");
  } catch (const ParseError& e) {
    CHECK(e.offset == 0);
  }
  try {
    parse("sin 2");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);  // expected '(' at the argument position
  }
  try {
    parse("(x1 + 2");
  } catch (const ParseError& e) {
    CHECK(e.offset == 7);
  }
  try {
    parse("x1 2");
  } catch (const ParseError& e) {
    CHECK(e.offset == 3);  // trailing garbage
  }
}

TEST_CASE("domain errors instead of silent NaN/Inf") {
  CHECK_THROWS_AS(eval_at(parse("1/x1"), 0.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("log(x1)"), -1.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("log(x1)"), 0.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("sqrt(x1)"), -4.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("x1^0.5"), -4.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("0^(-1)"), 0.0), EvalError);
  CHECK_THROWS_AS(eval_at(parse("exp(x1)"), 1000.0), EvalError);  // overflow
  CHECK_THROWS_AS(eval_at(parse("x2"), 0.0), EvalError);          // unbound
  try {
    eval_at(parse("x2 + 1"), 0.0);
  } catch (const EvalError& e) {
    CHECK(e.kind == EvalFailure::UnboundVariable);
  }
  // negative base with integral exponent is fine
  CHECK(eval_at(parse("(-2)^3"), 0.0) == -8.0);
}

TEST_CASE("fractional power value against calculator oracle") {
  const Expression e = parse("(1 - x1^2)^(-0.625)");
  const double v = eval_at(e, 0.6);
  CHECK(v == doctest::Approx(1.3217140793007052).epsilon(1e-12));
  CHECK(v == doctest::Approx(std::pow(0.64, -0.625)).epsilon(1e-14));
}

TEST_CASE("derivative examples") {
  const Expression d1 = derivative(parse("x1^4"), Var::X1);
  CHECK(eval_at(d1, 2.0) == doctest::Approx(32.0));  // 4 x^3

  CHECK(eval_at(derivative(parse("sin(2*x1)"), Var::X1), 0.0) == doctest::Approx(2.0));

  const Expression d3 = derivative(parse("exp(3*x1)"), Var::X1, 3);
  CHECK(eval_at(d3, 0.0) == doctest::Approx(27.0));

  CHECK_THROWS_AS(derivative(parse("abs(x1)"), Var::X1), EvalError);

  // non-constant exponent goes through the exp/log rewrite
  const Expression dxx = derivative(parse("x1^x1"), Var::X1);
  CHECK(eval_at(dxx, 2.0) == doctest::Approx(4.0 * (std::log(2.0) + 1.0)).epsilon(1e-13));

  // partials
  const Expression f = parse("x1^2 * x2 + sin(x2)");
  CHECK(eval_at(derivative(f, Var::X2), 2.0, 0.0) == doctest::Approx(5.0));
}

TEST_CASE("substitution") {
  const Expression f = parse("x1^2 + x2");
  const Expression g = substitute(f, Var::X2, constant(0.0));
  CHECK(eval_at(g, 3.0) == 9.0);
  // replacement is inserted as-is, not rescanned
  const Expression h = substitute(parse("x1 + 1"), Var::X1, parse("x1 + x2"));
  CHECK(eval_at(h, 1.0, 2.0) == 4.0);
}

namespace {

/// Random expression trees over the differentiable vocabulary. exp-like
/// growth is budgeted so finite differences stay well conditioned.
Expression random_ast(testsupport::Rng& rng, int depth, int& growth_budget) {
  const double leaf_prob = depth <= 0 ? 1.0 : 0.3;
  if (rng.unit() < leaf_prob) {
    switch (rng.index(4)) {
      case 0:
        return constant(rng.uniform(-2.0, 2.0));
      case 1:
      case 2:
        return variable(Var::X1);
      default:
        return variable(Var::X2);
    }
  }
  switch (rng.index(12)) {
    case 0:
      return add(random_ast(rng, depth - 1, growth_budget),
                 random_ast(rng, depth - 1, growth_budget));
    case 1:
      return sub(random_ast(rng, depth - 1, growth_budget),
                 random_ast(rng, depth - 1, growth_budget));
    case 2:
    case 3:
      return mul(random_ast(rng, depth - 1, growth_budget),
                 random_ast(rng, depth - 1, growth_budget));
    case 4:
      return div(random_ast(rng, depth - 1, growth_budget),
                 random_ast(rng, depth - 1, growth_budget));
    case 5:
      return apply(UnaryOp::Sin, random_ast(rng, depth - 1, growth_budget));
    case 6:
      return apply(UnaryOp::Cos, random_ast(rng, depth - 1, growth_budget));
    case 7:
      if (growth_budget-- > 0)
        return apply(UnaryOp::Exp, random_ast(rng, depth - 1, growth_budget));
      return apply(UnaryOp::Tanh, random_ast(rng, depth - 1, growth_budget));
    case 8:
      return apply(UnaryOp::Sqrt, random_ast(rng, depth - 1, growth_budget));
    case 9:
      return apply(UnaryOp::Log, random_ast(rng, depth - 1, growth_budget));
    case 10: {
      static const double exps[] = {2.0, 3.0, -1.0, 0.5, 1.5};
      return pow(random_ast(rng, depth - 1, growth_budget), constant(exps[rng.index(5)]));
    }
    default:
      if (growth_budget-- > 0)
        return apply(rng.unit() < 0.5 ? UnaryOp::Cosh : UnaryOp::Sinh,
                     random_ast(rng, depth - 1, growth_budget));
      return neg(random_ast(rng, depth - 1, growth_budget));
  }
}

}  // namespace

TEST_CASE("property: symbolic derivative matches central differences") {
  testsupport::Rng rng(20240801);
  const double h = 1e-5;
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    int budget = 1;
    Expression ast = random_ast(rng, 5, budget);
    Expression dast = derivative(ast, Var::X1);  // no abs in the generator
    int points = 0;
    for (int s = 0; s < 40 && points < 10; ++s) {
      const double x = rng.uniform(-1.0, 1.0);
      const double y = rng.uniform(-1.0, 1.0);
      double f0, fp, fm, fp2, fm2, sym;
      try {
        f0 = eval_at(ast, x, y);
        fp = eval_at(ast, x + h, y);
        fm = eval_at(ast, x - h, y);
        fp2 = eval_at(ast, x + h / 2, y);
        fm2 = eval_at(ast, x - h / 2, y);
        sym = eval_at(dast, x, y);
      } catch (const EvalError&) {
        continue;  // inadmissible point
      }
      if (std::fabs(f0) > 1e3 || std::fabs(sym) > 1e3) continue;
      const double fd = (fp - fm) / (2.0 * h);
      const double fd2 = (fp2 - fm2) / h;
      // the finite-difference oracle must itself be converged here
      if (std::fabs(fd - fd2) > 1e-7 * (1.0 + std::fabs(fd2))) continue;
      ++points;
      ++checked;
      CHECK(std::fabs(sym - fd2) <= 1e-6 * (1.0 + std::fabs(sym)));
    }
  }
  CHECK(checked >= 600);  // the generator must produce plenty of admissible cases
  MESSAGE("derivative property checked at ", checked, " admissible points");
}

TEST_CASE("property: print/parse round trip preserves evaluation") {
  testsupport::Rng rng(77002);
  int compared = 0;
  for (int t = 0; t < 200; ++t) {
    int budget = 1;
    Expression ast = random_ast(rng, 4, budget);
    Expression back;
    REQUIRE_NOTHROW(back = parse(to_string(ast)));
    for (int s = 0; s < 10; ++s) {
      const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
      double a, b;
      try {
        a = eval_at(ast, x, y);
      } catch (const EvalError&) {
        continue;
      }
      bool ok = true;
      try {
        b = eval_at(back, x, y);
      } catch (const EvalError&) {
        ok = false;
        b = 0.0;
      }
      CHECK_MESSAGE(ok, "reparse lost the domain: ", to_string(ast));
      if (!ok) continue;
      ++compared;
      CHECK(std::fabs(a - b) <= 1e-15 * (1.0 + std::fabs(a)));
    }
  }
  CHECK(compared >= 800);
}

TEST_CASE("property: evaluation is total or throws, never silent NaN") {
  testsupport::Rng rng(555001);
  for (int t = 0; t < 300; ++t) {
    int budget = 2;
    Expression ast = random_ast(rng, 5, budget);
    for (int s = 0; s < 5; ++s) {
      try {
        const double v = eval_at(ast, rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        CHECK(std::isfinite(v));
      } catch (const EvalError&) {
        // fine: the documented failure mode
      }
    }
  }
}
