#include <cmath>

#include "formalcalc/base_function.hpp"
#include "formalcalc/errors.hpp"
#include "helpers.hpp"

using fc::SmoothExpr;

namespace {

double central_difference(const SmoothExpr& e, double at) {
  const long double h = 1e-5L;
  return static_cast<double>(((e.evaluate(at + h) - e.evaluate(at - h)) / (2 * h)).real());
}

}  // namespace

TEST_CASE("polynomial differentiation") {
  SmoothExpr x2 = SmoothExpr::parse("(pow x 2)");
  CHECK(x2.derivative().evaluate(q(3)) == fc::Number(6));
  CHECK(SmoothExpr::constant(1).derivative().is_zero());
  CHECK(SmoothExpr::parse("(+ (pow x 2) 1)").evaluate(q(2)) == fc::Number(5));
}

TEST_CASE("kernel evaluation") {
  SmoothExpr s = SmoothExpr::parse("(s x)");
  CHECK(s.evaluate(q(-1)) == fc::Number(0));
  CHECK(s.evaluate(q(0)) == fc::Number(0));
  CHECK(std::abs(re(s.evaluate(q(1))) - 0.36787944117144233) < 1e-10);
}

TEST_CASE("product-rule derivative against finite differences") {
  SmoothExpr e = SmoothExpr::parse("(* (s x) (s (- 1 x)))");
  const double d = re(e.derivative().evaluate(q(1, 2)));
  CHECK(std::abs(d - central_difference(e, 0.5)) < 1e-8);
  // derivative chains stay accurate through the kernel family
  SmoothExpr d2 = e.derivative(2);
  CHECK(std::abs(re(d2.evaluate(q(1, 3))) - central_difference(e.derivative(), 1.0 / 3)) < 1e-7);
}

TEST_CASE("bump values and derivative") {
  SmoothExpr b = fc::bump(0, 1, 2, 3);
  CHECK(b.evaluate(q(3, 2)) == fc::Number(1));
  CHECK(b.evaluate(q(7, 2)) == fc::Number(0));
  CHECK(b.evaluate(q(1)) == fc::Number(1));
  CHECK(b.evaluate(q(3)) == fc::Number(0));
  const double mid = re(b.evaluate(q(1, 2)));
  CHECK(mid > 0);
  CHECK(mid < 1);
  CHECK(std::abs(re(b.derivative().evaluate(q(1, 2))) - central_difference(b, 0.5)) < 1e-8);
  auto bound = b.support_bound();
  REQUIRE(bound);
  CHECK(*bound == fc::IntervalSet::closed(0, 3));
  CHECK_THROWS_AS(fc::bump(0, 2, 1, 3), fc::PreconditionError);
}

TEST_CASE("bump values stay in [0, 1] on a grid") {
  SmoothExpr b = fc::bump(q(-1), q(-1, 2), q(1, 3), q(2));
  for (int n = 0; n <= 100; ++n) {
    const long double at = -1.5L + 4.0L * n / 100;
    const long double v = b.evaluate(at).real();
    CHECK(v >= 0);
    CHECK(v <= 1);
  }
}

TEST_CASE("s-expression roundtrip and grammar extensions") {
  for (const char* text : {"(+ (pow x 2) 1)", "(/ (s x) (+ (s x) (s (- 1 x))))", "(sk 2 x)",
                           "(supp (0 1) (s x))", "(* 1/2+i x)"}) {
    SmoothExpr e = SmoothExpr::parse(text);
    CHECK(SmoothExpr::parse(e.to_sexpr()).to_sexpr() == e.to_sexpr());
  }
  CHECK_THROWS_AS(SmoothExpr::parse("(+ x"), fc::ParseError);
  CHECK_THROWS_AS(SmoothExpr::parse("(foo x)"), fc::ParseError);
}

TEST_CASE("support declarations evaluate to exact zero outside") {
  SmoothExpr e = SmoothExpr::with_support(SmoothExpr::parse("(/ 1 x)"), fc::IntervalSet::closed(1, 2));
  CHECK(e.evaluate(q(0)) == fc::Number(0));
  CHECK(e.evaluate(q(3, 2)) == fc::Number(q(2, 3)));
  CHECK(e.derivative().evaluate(q(5)) == fc::Number(0));
}

TEST_CASE("integration") {
  auto base = fc::BaseSpace::discrete({"p", "q"});
  fc::BaseDensity d(values({{0, fc::ExactComplex(1)}, {1, fc::ExactComplex(2)}}));
  CHECK(fc::integrate(d, pts({0, 1})) == fc::Number(3));
  CHECK(fc::integrate(d, pts({1})) == fc::Number(2));

  auto line = fc::Region::whole(*fc::BaseSpace::smooth_line());
  fc::BaseDensity x2(fc::BaseFunction(SmoothExpr::with_support(SmoothExpr::parse("(pow x 2)"), fc::IntervalSet::closed(0, 1))));
  fc::Number v = fc::integrate(x2, line);
  CHECK(v.is_exact());
  CHECK(v == fc::Number(q(1, 3)));
  CHECK(fc::integrate(fc::BaseDensity(fc::BaseFunction(SmoothExpr())), line) == fc::Number(0));

  // total derivative of a compactly supported density
  SmoothExpr g = fc::bump(0, 1, 2, 3) * SmoothExpr::parse("(+ (pow x 2) 1)");
  fc::Number total = fc::integrate(fc::BaseDensity(fc::BaseFunction(g.derivative())), line);
  CHECK(total.abs() < 1e-8);
  // plateau of length 1 plus two symmetric edges of area 1/2 each
  fc::Number area = fc::integrate(fc::BaseDensity(fc::BaseFunction(fc::bump(0, 1, 2, 3))), line);
  CHECK(std::abs(re(area) - 2.0) < 1e-9);
}

TEST_CASE("quadrature budget") {
  fc::QuadratureOptions tight;
  tight.budget = 15;
  auto wild = [](fc::Real x) { return fc::ComplexReal(std::sin(1 / (x + 1e-3L)), 0); };
  CHECK_THROWS_AS(fc::integrate_adaptive(wild, 0, 1, tight), fc::QuadratureError);
  auto r = fc::integrate_adaptive([](fc::Real x) { return fc::ComplexReal(std::exp(x), 0); }, 0, 1);
  CHECK(std::abs(static_cast<double>(r.value.real()) - (std::exp(1.0) - 1)) < 1e-12);
}
