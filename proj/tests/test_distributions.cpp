#include "formalcalc/errors.hpp"
#include "formalcalc/families.hpp"
#include "formalcalc/random.hpp"
#include "helpers.hpp"

using fc::BaseDistribution;
using fc::FormalDensity;
using fc::FormalDistribution;
using fc::FormalFunction;
using fc::MultiIndex;

namespace {

FormalDistribution scalar(const fc::BasePtr& base, const fc::Region& u, std::size_t k, const MultiIndex& l,
                          BaseDistribution t) {
  return FormalDistribution(base, u, k, 1, {{l, {std::move(t)}}});
}

}  // namespace

TEST_CASE("apply_dist examples") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  auto eta = scalar(base, u, 1, MultiIndex{0}, BaseDistribution::discrete({{0, 1}}));
  fc::SupportedFormalFunction f(FormalFunction(base, u, 1, 0, {{MultiIndex{0}, values({{0, 7}, {1, 1}})}}), u);
  CHECK(fc::apply_dist(eta, f)[0] == fc::Number(7));
  CHECK(fc::apply_dist(FormalDistribution(base, u, 1, 1), f)[0] == fc::Number(0));

  auto line = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*line);
  auto delta = scalar(line, m, 1, MultiIndex{1}, BaseDistribution::point(0, 0));
  auto g = fc::SupportedFormalFunction::from(
      FormalFunction(line, m, 1, 1, {{MultiIndex{1}, fc::BaseFunction(fc::bump(-2, -1, 1, 2))}}));
  CHECK(fc::apply_dist(delta, g)[0] == fc::Number(1));
  auto eta2 = scalar(base, u, 1, MultiIndex{2}, BaseDistribution::discrete({{0, 1}}));
  CHECK_THROWS_AS(fc::apply_dist(eta2, f), fc::TruncationError);
}

TEST_CASE("apply_gen examples and embedding consistency") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  fc::GeneralizedFunction g(base, u, 1, 1, 1, {{MultiIndex{1}, {BaseDistribution::discrete({{0, 2}})}}});
  auto eta = FormalDensity::monomial(base, u, 1, MultiIndex(0), MultiIndex{1}, fc::BaseDensity(values({{0, 3}})));
  CHECK(fc::apply_gen(g, eta)[0] == fc::Number(6));
  CHECK(fc::apply_gen(fc::GeneralizedFunction(base, u, 1, 1, 1), eta)[0] == fc::Number(0));

  fc::Rng rng(1);
  for (int n = 0; n < 100; ++n) {
    auto f = fc::random_function(rng, base, u, 2, 3);
    auto d = fc::random_density(rng, base, u, 2, 3);
    CHECK(fc::apply_gen(fc::GeneralizedFunction::embed(f), d)[0] == fc::pair(d, f));
  }
  auto line = fc::BaseSpace::smooth_line();
  auto w = open_iv(-1, 3);
  for (int n = 0; n < 5; ++n) {
    auto f = fc::random_function(rng, line, w, 1, 2);
    auto d = fc::random_density(rng, line, w, 1, 2);
    CHECK(fc::distance(fc::apply_gen(fc::GeneralizedFunction::embed(f), d)[0], fc::pair(d, f)) < 1e-8);
  }
}

TEST_CASE("point terms transpose derivative stacks with a sign") {
  auto line = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*line);
  // T = delta_0; <T, tau d> = -tau'(0) for tau = (x + 1)^2 bump
  fc::GeneralizedFunction t(line, m, 0, 0, 1, {{MultiIndex(0), {BaseDistribution::point(0, 0)}}});
  auto tau = fc::BaseDensity(fc::BaseFunction(fc::SmoothExpr::parse("(pow (+ x 1) 2)") * fc::bump(-2, -1, 1, 2)));
  auto eta = FormalDensity::monomial(line, m, 0, MultiIndex{1}, MultiIndex(0), tau);
  CHECK(fc::apply_gen(t, eta)[0] == fc::Number(-2));
}

TEST_CASE("module action on distributions") {
  auto base = points({"a", "b", "c"});
  auto u = pts({0, 1, 2});
  fc::Rng rng(2);
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform(1, 2));
    auto eta = fc::random_distribution(rng, base, u, k, 2, 1);
    auto f = fc::random_function(rng, base, u, k, 2);
    auto w = fc::random_compact_function(rng, base, u, k, 2);
    fc::SupportedFormalFunction fw(f * w.function(), u);
    CHECK(fc::apply_dist(fc::module_action_dist(eta, f), w) == fc::apply_dist(eta, fw));
  }
  auto eta = fc::random_distribution(rng, base, u, 1, 2, 2);
  auto one = FormalFunction::constant(base, u, 1, 2, 1);
  auto w = fc::random_compact_function(rng, base, u, 1, 2);
  CHECK(fc::apply_dist(fc::module_action_dist(eta, one), w) == fc::apply_dist(eta, w));
  CHECK(fc::module_action_dist(eta, FormalFunction::zero(base, u, 1, 2)).coeffs().empty());
}

TEST_CASE("module action on the line with point terms") {
  auto line = fc::BaseSpace::smooth_line();
  auto u = open_iv(-2, 2);
  fc::Rng rng(17);
  for (int n = 0; n < 6; ++n) {
    auto eta = fc::random_distribution(rng, line, u, 1, 2, 1);
    auto f = fc::random_function(rng, line, u, 1, 2);
    auto w = fc::random_compact_function(rng, line, u, 1, 2);
    auto fw = fc::SupportedFormalFunction(f * w.function(), w.support());
    CHECK(fc::max_distance(fc::apply_dist(fc::module_action_dist(eta, f), w), fc::apply_dist(eta, fw)) < 1e-8);
  }
}

TEST_CASE("cutoff extension is independent of the cutoff") {
  auto base = points({"p", "q", "r"});
  auto m = pts({0, 1, 2});
  auto eta = fc::CompactFormalDistribution::from(scalar(base, m, 1, MultiIndex{1}, BaseDistribution::discrete({{0, 3}})));
  fc::SupportedFormalFunction f1(FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{0, 1}, {1, 1}})}}), pts({0, 1}));
  fc::SupportedFormalFunction f2(FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{0, 1}})}}), pts({0}));
  auto e1 = fc::cutoff_extend(eta, f1, pts({0, 1}));
  auto e2 = fc::cutoff_extend(eta, f2, pts({0}));
  fc::Rng rng(9);
  for (int n = 0; n < 100; ++n) {
    auto u = fc::random_function(rng, base, m, 1, 2);
    CHECK(e1(u) == e2(u));
    CHECK(e1(u) == fc::apply_dist(eta.distribution(), fc::SupportedFormalFunction(u, m)));
  }
  fc::SupportedFormalFunction wrong(FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{1, 1}})}}), pts({1}));
  CHECK_THROWS_AS(fc::cutoff_extend(eta, wrong, pts({1})), fc::SupportError);
  CHECK_THROWS_AS(fc::cutoff_extend(eta, wrong, pts({0})), fc::SupportError);
}

TEST_CASE("cutoff extension on the line") {
  auto line = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*line);
  auto eta = fc::CompactFormalDistribution::from(scalar(line, m, 1, MultiIndex{0}, BaseDistribution::point(q(1, 2), 1)));
  auto cut = [&](const fc::Rational& a, const fc::Rational& b, const fc::Rational& c, const fc::Rational& d) {
    return fc::SupportedFormalFunction::from(
        FormalFunction(line, m, 1, 1, {{MultiIndex{0}, fc::BaseFunction(fc::bump(a, b, c, d))}}));
  };
  auto e1 = fc::cutoff_extend(eta, cut(-1, 0, 1, 2), open_iv(0, 1));
  auto e2 = fc::cutoff_extend(eta, cut(0, q(1, 4), q(3, 4), 1), open_iv(q(1, 4), q(3, 4)));
  FormalFunction u(line, m, 1, 1, {{MultiIndex{0}, expr("(pow x 3)")}});
  CHECK(e1(u)[0] == fc::Number(q(3, 4)));
  CHECK(e2(u)[0] == fc::Number(q(3, 4)));
  CHECK_THROWS_AS(fc::cutoff_extend(eta, cut(-1, 0, 1, 2), open_iv(1, 2)), fc::SupportError);
}

TEST_CASE("point distributions") {
  auto line = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*line);
  auto a = fc::Point::line(0);
  auto eta = fc::PointDistribution::basis(line, a, 1, MultiIndex{1}, MultiIndex{1});
  FormalFunction u(line, m, 1, 1, {{MultiIndex{0}, expr("(pow x 2)")}, {MultiIndex{1}, expr("x")}});
  CHECK(fc::point_apply(eta, u)[0] == fc::Number(1));
  auto ev = fc::PointDistribution::basis(line, a, 1, MultiIndex{0}, MultiIndex{0});
  CHECK(fc::point_apply(ev, u)[0] == fc::ev(u, a));

  // monomial duality
  for (std::uint32_t i = 0; i <= 3; ++i) {
    for (std::uint32_t j = 0; j <= 3; ++j) {
      for (std::uint32_t i2 = 0; i2 <= 3; ++i2) {
        for (std::uint32_t j2 = 0; j2 <= 3; ++j2) {
          FormalFunction mono = FormalFunction::monomial(line, m, 1, 3, MultiIndex{j2},
                                                         fc::BaseFunction(fc::SmoothExpr::pow(fc::SmoothExpr::x(), i2)));
          auto v = fc::point_apply(fc::PointDistribution::basis(line, a, 1, MultiIndex{i}, MultiIndex{j}), mono)[0];
          long expected = (i == i2 && j == j2) ? static_cast<long>(fc::factorial(MultiIndex{i}).get_si() *
                                                                   fc::factorial(MultiIndex{j}).get_si())
                                               : 0;
          CHECK(v == fc::Number(expected));
        }
      }
    }
  }

  auto cz = fc::to_compact(eta);
  CHECK(cz.support() == fc::Region::intervals(fc::IntervalSet::point(0)));
  fc::Rng rng(4);
  for (int n = 0; n < 20; ++n) {
    auto p = fc::random_point_distribution(rng, line, a, 1, 2, 1);
    auto w = fc::random_compact_function(rng, line, open_iv(-1, 1), 1, 2);
    auto global = fc::extend_by_zero(w, m);
    auto lhs = fc::apply_dist(fc::to_compact(p).distribution(), global);
    CHECK(fc::max_distance(lhs, fc::point_apply(p, global.function())) < 1e-8);
  }
  auto zero = fc::PointDistribution(line, a, 1, 1);
  CHECK(fc::to_compact(zero).distribution().coeffs().empty());
}

TEST_CASE("to_compact agrees exactly on a discrete base") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  fc::Rng rng(10);
  for (int n = 0; n < 100; ++n) {
    auto p = fc::random_point_distribution(rng, base, fc::Point::discrete(1), 2, 3, 1);
    auto w = fc::random_compact_function(rng, base, u, 2, 3);
    CHECK(fc::apply_dist(fc::to_compact(p).distribution(), w) == fc::point_apply(p, w.function()));
  }
}

TEST_CASE("jet kernel and dimension") {
  auto line = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*line);
  FormalFunction x2y(line, m, 1, 4, {{MultiIndex{1}, expr("(pow x 2)")}});
  CHECK(fc::jet_kernel_check(x2y, fc::Point::line(0), 3));
  CHECK_FALSE(fc::jet_kernel_check(x2y, fc::Point::line(0), 4));
  CHECK(fc::jet_kernel_check(FormalFunction::zero(line, m, 1, 5), fc::Point::line(0), 5));
  CHECK_FALSE(fc::jet_kernel_check(FormalFunction::constant(line, m, 1, 2, 1), fc::Point::line(0), 1));
  CHECK_THROWS_AS(fc::jet_kernel_check(x2y.truncated(2), fc::Point::line(0), 3), fc::TruncationError);
  CHECK(fc::dist_space_dimension(0, 0, 5) == 1);
  CHECK(fc::dist_space_dimension(1, 1, 2) == 6);
  CHECK(fc::dist_space_dimension(1, 2, 3) == 20);
}

TEST_CASE("componentwise law for E-valued applications") {
  auto base = points({"a", "b", "c"});
  auto u = pts({0, 1, 2});
  fc::Rng rng(6);
  for (int n = 0; n < 50; ++n) {
    auto eta = fc::random_distribution(rng, base, u, 2, 2, 3);
    auto w = fc::random_compact_function(rng, base, u, 2, 2);
    auto full = fc::apply_dist(eta, w);
    for (std::size_t e = 0; e < 3; ++e) CHECK(full[e] == fc::apply_dist(eta.component(e), w)[0]);
    auto g = fc::random_generalized(rng, base, u, 2, 2, 3);
    auto d = fc::random_density(rng, base, u, 2, 2);
    auto gv = fc::apply_gen(g, d);
    for (std::size_t e = 0; e < 3; ++e) CHECK(gv[e] == fc::apply_gen(g.component(e), d)[0]);
  }
}

TEST_CASE("support soundness") {
  auto base = points({"a", "b", "c"});
  auto u = pts({0, 1, 2});
  fc::Rng rng(16);
  for (int n = 0; n < 50; ++n) {
    auto eta = fc::CompactFormalDistribution::from(fc::random_distribution(rng, base, pts({0}), 1, 2, 1));
    auto w = fc::random_compact_function(rng, base, pts({1, 2}), 1, 2);
    CHECK(fc::apply_dist(fc::ext(eta, u).distribution(), fc::extend_by_zero(w, u))[0].is_zero());
  }
}

TEST_CASE("exact rank") {
  using fc::ExactComplex;
  CHECK(fc::exact_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(fc::exact_rank({{1, 0}, {0, ExactComplex(0, 1)}}) == 2);
  CHECK(fc::exact_rank({}) == 0);
  CHECK(fc::numeric_rank({{1.0L, 2.0L}, {2.0L, 4.0L + 1e-15L}}, 1e-9L) == 1);
}
