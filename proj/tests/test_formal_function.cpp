#include "formalcalc/errors.hpp"
#include "formalcalc/random.hpp"
#include "helpers.hpp"

using fc::ExactComplex;
using fc::FormalFunction;
using fc::MultiIndex;

namespace {

FormalFunction line_fn(std::size_t k, unsigned trunc, std::vector<std::pair<MultiIndex, std::string>> cs) {
  auto base = fc::BaseSpace::smooth_line();
  FormalFunction::Coeffs c;
  for (auto& [j, e] : cs) c.emplace(j, expr(e));
  return FormalFunction(base, fc::Region::whole(*base), k, trunc, std::move(c));
}

}  // namespace

TEST_CASE("add, scale and truncation") {
  auto base = points({"p"});
  auto u = pts({0});
  auto one_plus_y = FormalFunction::constant(base, u, 1, 2, 1) +
                    FormalFunction::monomial(base, u, 1, 2, MultiIndex{1}, values({{0, 1}}));
  auto two_plus_y2 = FormalFunction::constant(base, u, 1, 2, 2) +
                     FormalFunction::monomial(base, u, 1, 2, MultiIndex{2}, values({{0, 1}}));
  auto sum = one_plus_y + two_plus_y2;
  CHECK(sum.coeff(MultiIndex{0}) == values({{0, 3}}));
  CHECK(sum.coeff(MultiIndex{1}) == values({{0, 1}}));
  CHECK(sum.coeff(MultiIndex{2}) == values({{0, 1}}));
  CHECK((one_plus_y + one_plus_y.scaled(-1)).is_zero());
  CHECK((one_plus_y + FormalFunction::zero(base, u, 1, 2)) == one_plus_y);
  CHECK((one_plus_y + FormalFunction::zero(base, u, 1, 1)).trunc() == 1);
  CHECK_THROWS_AS(one_plus_y.coeff(MultiIndex{3}), fc::TruncationError);
  CHECK_THROWS_AS(one_plus_y + FormalFunction::zero(base, u, 2, 2), fc::MismatchError);
}

TEST_CASE("Cauchy product") {
  auto base = points({"p"});
  auto u = pts({0});
  auto y = FormalFunction::monomial(base, u, 1, 2, MultiIndex{1}, values({{0, 1}}));
  auto one = FormalFunction::constant(base, u, 1, 2, 1);
  CHECK(y * y == FormalFunction::monomial(base, u, 1, 2, MultiIndex{2}, values({{0, 1}})));
  auto sq = (one + y) * (one + y);
  CHECK(sq.coeff(MultiIndex{0}) == values({{0, 1}}));
  CHECK(sq.coeff(MultiIndex{1}) == values({{0, 2}}));
  CHECK(sq.coeff(MultiIndex{2}) == values({{0, 1}}));
  CHECK(one * sq == sq);
}

TEST_CASE("restriction and extension by zero") {
  auto base = points({"p", "q", "r"});
  auto all = pts({0, 1, 2});
  auto f = FormalFunction::constant(base, pts({0, 1}), 1, 1, 0) +
           FormalFunction(base, pts({0, 1}), 1, 1, {{MultiIndex{0}, values({{0, 1}, {1, 2}})}});
  CHECK(f.restrict(pts({0})).coeff(MultiIndex{0}) == values({{0, 1}}));
  CHECK(f.restrict(pts({0, 1})) == f);
  CHECK_THROWS_AS(f.restrict(pts({2})), fc::SupportError);

  fc::SupportedFormalFunction s(FormalFunction(base, pts({0}), 1, 1, {{MultiIndex{0}, values({{0, 4}})}}), pts({0}));
  auto e = fc::extend_by_zero(s, pts({0, 1}));
  CHECK(e.function().coeff(MultiIndex{0}) == values({{0, 4}}));
  CHECK(e.function().restrict(pts({0})) == s.function());
  CHECK(fc::extend_by_zero(s, pts({0})).function() == s.function());
  (void)all;
}

TEST_CASE("cutoff product vanishes off the support of f") {
  auto base = points({"p", "q", "r"});
  auto m = pts({0, 1, 2});
  fc::SupportedFormalFunction f(FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{0, 3}})}}), pts({0}));
  fc::Rng rng(7);
  auto u = fc::random_function(rng, base, pts({0, 1}), 1, 2);
  auto fu = fc::cutoff_product(f, u);
  for (const auto& [j, c] : fu.function().coeffs()) {
    CHECK(c.evaluate(fc::Point::discrete(1)).is_zero());
    CHECK(c.evaluate(fc::Point::discrete(2)).is_zero());
    CHECK(c.evaluate(fc::Point::discrete(0)) == u.coeff(j).evaluate(fc::Point::discrete(0)) * fc::Number(3));
  }
  fc::SupportedFormalFunction zero(FormalFunction::zero(base, m, 1, 2), pts({}));
  CHECK(fc::cutoff_product(zero, u).function().is_zero());
  fc::SupportedFormalFunction bad(FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{2, 1}})}}), pts({2}));
  CHECK_THROWS_AS(fc::cutoff_product(bad, u), fc::SupportError);
}

TEST_CASE("jets and evaluation") {
  auto xy = line_fn(1, 2, {{MultiIndex{1}, "x"}});
  auto a = fc::Point::line(0);
  CHECK(fc::jet(xy, a, MultiIndex{1}, MultiIndex{1}) == fc::Number(1));
  CHECK(fc::jet(xy, a, MultiIndex{0}, MultiIndex{2}) == fc::Number(0));
  auto x2y2 = line_fn(1, 2, {{MultiIndex{2}, "(pow x 2)"}});
  CHECK(fc::jet(x2y2, a, MultiIndex{2}, MultiIndex{2}) == fc::Number(4));
  auto two_3y = line_fn(1, 1, {{MultiIndex{0}, "2"}, {MultiIndex{1}, "3"}});
  CHECK(fc::ev(two_3y, fc::Point::line(q(7, 3))) == fc::Number(2));
  CHECK(fc::ev(line_fn(1, 1, {{MultiIndex{1}, "1"}}), a) == fc::Number(0));
  CHECK(fc::ev(line_fn(0, 0, {{MultiIndex(0), "5"}}), a) == fc::Number(5));
  CHECK_THROWS_AS(fc::jet(xy, a, MultiIndex{0}, MultiIndex{3}), fc::TruncationError);

  auto base = points({"p"});
  auto d = FormalFunction::constant(base, pts({0}), 1, 1, 1);
  CHECK_THROWS_AS(fc::jet(d, fc::Point::discrete(0), MultiIndex{1}, MultiIndex{0}), fc::PreconditionError);
  auto other = points({"p", "q"});
  auto partial = FormalFunction::constant(other, pts({0}), 1, 1, 1);
  CHECK_THROWS_AS(fc::ev(partial, fc::Point::discrete(1)), fc::SupportError);
}

TEST_CASE("ring laws on random discrete instances") {
  auto base = points({"a", "b", "c", "d", "e"});
  auto u = pts({0, 1, 2, 3, 4});
  fc::Rng rng(11);
  for (int n = 0; n < 60; ++n) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform(0, 2));
    const unsigned t = static_cast<unsigned>(rng.uniform(0, 4));
    auto f = fc::random_function(rng, base, u, k, t);
    auto g = fc::random_function(rng, base, u, k, t);
    auto h = fc::random_function(rng, base, u, k, t);
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * g == g * f);
    CHECK(f * (g + h) == f * g + f * h);
    auto v = pts({0, 2});
    CHECK((f * g).restrict(v) == f.restrict(v) * g.restrict(v));
    CHECK((f * g).restrict(v).restrict(pts({2})) == (f * g).restrict(pts({2})));
    if (t > 0) CHECK((f * g).truncated(t - 1) == f.truncated(t - 1) * g.truncated(t - 1));
  }
}

TEST_CASE("Leibniz rule for jets on the line") {
  fc::Rng rng(5);
  auto base = fc::BaseSpace::smooth_line();
  auto whole = fc::Region::whole(*base);
  auto a = fc::Point::line(q(1, 3));
  for (int n = 0; n < 10; ++n) {
    auto u = fc::random_function(rng, base, whole, 1, 3);
    auto v = fc::random_function(rng, base, whole, 1, 3);
    auto uv = u * v;
    for (const auto& i : fc::enumerate_upto(1, 3)) {
      for (const auto& j : fc::enumerate_upto(1, 3 - static_cast<std::uint32_t>(i.degree()))) {
        fc::Number expected(0);
        for (const auto& ip : fc::enumerate_below(i)) {
          for (const auto& jp : fc::enumerate_below(j)) {
            fc::Number w(fc::Rational(fc::binomial(i, ip) * fc::binomial(j, jp)));
            expected += w * fc::jet(u, a, ip, jp) * fc::jet(v, a, i - ip, j - jp);
          }
        }
        CHECK(fc::distance(fc::jet(uv, a, i, j), expected) < 1e-12);
      }
    }
  }
}
