#include "formalcalc/diffops.hpp"
#include "formalcalc/errors.hpp"
#include "formalcalc/random.hpp"
#include "helpers.hpp"

using fc::BaseDensity;
using fc::FormalDensity;
using fc::FormalFunction;
using fc::MultiIndex;

TEST_CASE("pair examples") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  auto eta = FormalDensity::monomial(base, u, 1, MultiIndex(0), MultiIndex{2}, BaseDensity(values({{0, 1}})));
  auto f = FormalFunction::monomial(base, u, 1, 2, MultiIndex{2}, values({{0, 5}}));
  CHECK(fc::pair(eta, f) == fc::Number(10));

  auto eta1 = FormalDensity::monomial(base, u, 1, MultiIndex(0), MultiIndex{1}, BaseDensity(values({{0, 1}, {1, 1}})));
  FormalFunction g(base, u, 1, 2,
                   {{MultiIndex{0}, values({{0, 1}, {1, 2}})}, {MultiIndex{1}, values({{0, 3}})},
                    {MultiIndex{2}, values({{1, 1}})}});
  CHECK(fc::pair(eta1, g) == fc::Number(3));
  CHECK(fc::pair(FormalDensity::zero(base, u, 1), g) == fc::Number(0));
  CHECK_THROWS_AS(fc::pair(eta, g.truncated(1)), fc::TruncationError);
  CHECK_THROWS_AS(fc::pair(eta, FormalFunction::zero(base, pts({0}), 1, 2)), fc::MismatchError);
}

TEST_CASE("pair on the line uses the derivative stack") {
  auto base = fc::BaseSpace::smooth_line();
  auto m = fc::Region::whole(*base);
  BaseDensity tau(fc::BaseFunction(fc::bump(0, 1, 2, 3)));
  auto eta = FormalDensity::monomial(base, m, 0, MultiIndex{1}, MultiIndex(0), tau);
  auto u = FormalFunction(base, m, 0, 0, {{MultiIndex(0), expr("(pow x 2)")}});
  // <tau d, x^2> = int bump * 2x = 2 * 3 (bump symmetric about 3/2, area 2)
  CHECK(std::abs(re(fc::pair(eta, u)) - 6.0) < 1e-8);
}

TEST_CASE("module action identity, associativity and the cutoff") {
  auto base = points({"a", "b", "c", "d"});
  auto u = pts({0, 1, 2, 3});
  fc::Rng rng(3);
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform(1, 2));
    const unsigned r = static_cast<unsigned>(rng.uniform(0, 3));
    auto eta = fc::random_density(rng, base, u, k, r);
    auto f = fc::random_function(rng, base, u, k, r);
    auto g = fc::random_function(rng, base, u, k, r);
    auto w = fc::random_function(rng, base, u, k, r);
    CHECK(fc::pair(fc::module_action(eta, f), w) == fc::pair(eta, f * w));
    CHECK(fc::module_action(fc::module_action(eta, f), g) == fc::module_action(eta, f * g));
    CHECK(fc::module_action(eta, FormalFunction::constant(base, u, k, r, 1)) == eta);
    CHECK(fc::module_action(eta, FormalFunction::zero(base, u, k, r)).is_zero());
  }
}

TEST_CASE("module action identity on the line") {
  auto base = fc::BaseSpace::smooth_line();
  auto u = open_iv(0, 4);
  fc::Rng rng(19);
  for (int n = 0; n < 6; ++n) {
    auto eta = fc::random_density(rng, base, u, 1, 2);
    auto f = fc::random_function(rng, base, u, 1, 2);
    auto w = fc::random_function(rng, base, u, 1, 2);
    CHECK(fc::distance(fc::pair(fc::module_action(eta, f), w), fc::pair(eta, f * w)) < 1e-8);
  }
}

TEST_CASE("ext is the transpose of restriction and is injective") {
  auto base = points({"a", "b", "c", "d"});
  auto big = pts({0, 1, 2, 3});
  auto small = pts({1, 2});
  fc::Rng rng(4);
  for (int n = 0; n < 50; ++n) {
    auto eta = fc::random_density(rng, base, small, 2, 2);
    auto u = fc::random_function(rng, base, big, 2, 2);
    CHECK(fc::pair(fc::ext(eta, big), u) == fc::pair(eta, u.restrict(small)));
    CHECK(fc::ext(eta, big).is_zero() == eta.is_zero());
  }
  CHECK(fc::ext(FormalDensity::zero(base, small, 1), big).is_zero());
  CHECK_THROWS_AS(fc::ext(FormalDensity::zero(base, big, 1), small), fc::SupportError);
}

TEST_CASE("cutoff restriction") {
  auto base = points({"p", "q", "r"});
  auto m = pts({0, 1, 2});
  fc::Rng rng(8);
  for (int n = 0; n < 50; ++n) {
    auto eta = fc::random_density(rng, base, m, 1, 2);
    fc::SupportedFormalFunction f(
        FormalFunction(base, m, 1, 2, {{MultiIndex{0}, values({{0, rng.small_complex()}, {1, 1}})}}), pts({0, 1}));
    auto local = fc::cutoff_restrict(eta, f, pts({0, 1}));
    CHECK(fc::ext(local, m) == fc::module_action(eta, f.function()));
    CHECK(fc::support(local).subset_of(fc::support(eta).intersect(f.support())));
  }
  auto eta = FormalDensity::monomial(base, m, 1, MultiIndex(0), MultiIndex{0}, BaseDensity(values({{2, 1}})));
  fc::SupportedFormalFunction disjoint(FormalFunction(base, m, 1, 1, {{MultiIndex{0}, values({{0, 1}})}}), pts({0}));
  CHECK(fc::cutoff_restrict(eta, disjoint, pts({0, 1})).is_zero());
  fc::SupportedFormalFunction one(FormalFunction::constant(base, m, 1, 1, 1), m);
  CHECK(fc::cutoff_restrict(eta, one, m) == eta);
}

TEST_CASE("non-degeneracy against the dual basis") {
  auto base = points({"p", "q", "r"});
  auto m = pts({0, 1, 2});
  fc::Rng rng(12);
  for (int n = 0; n < 20; ++n) {
    auto u = fc::random_function(rng, base, m, 2, 2);
    bool all_zero = true;
    for (auto p : m.point_set()) {
      for (const auto& l : fc::enumerate_upto(2, 2)) {
        auto probe = FormalDensity::monomial(base, m, 2, MultiIndex(0), l, BaseDensity(values({{p, 1}})));
        all_zero = all_zero && fc::pair(probe, u).is_zero();
      }
    }
    CHECK(all_zero == u.is_zero());
  }
}

TEST_CASE("diffops: apply, rho and compositions") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  fc::DensityDiffOp d(base, u, 1, {{{MultiIndex(0), MultiIndex{2}}, BaseDensity(values({{0, 1}, {1, 1}}))}});
  FormalFunction f(base, u, 1, 2, {{MultiIndex{2}, values({{0, 5}})}});
  CHECK(fc::apply(d, f) == BaseDensity(values({{0, 10}})));
  CHECK(fc::rho(d) == FormalDensity::monomial(base, u, 1, MultiIndex(0), MultiIndex{2},
                                              BaseDensity(values({{0, 1}, {1, 1}}))));
  CHECK(fc::rho(fc::DensityDiffOp(base, u, 1)).is_zero());

  fc::Rng rng(21);
  for (int n = 0; n < 100; ++n) {
    auto op = fc::random_diffop(rng, base, u, 2, 2);
    auto w = fc::random_function(rng, base, u, 2, 3);
    auto g = fc::random_function(rng, base, u, 2, 3);
    auto h = fc::random_function(rng, base, u, 2, 3);
    CHECK(fc::pair(fc::rho(op), w) == fc::integrate(fc::apply(op, w), u));
    CHECK(fc::apply(fc::precompose_function(op, g), w) == fc::apply(op, g * w));
    CHECK(fc::precompose_function(fc::precompose_function(op, g), h) == fc::precompose_function(op, g * h));
    CHECK(fc::apply(fc::postcompose_function(g, op), w) == fc::apply(op, w).times(g.coeff(MultiIndex{0, 0})));
    CHECK(fc::rho(fc::precompose_function(op, g)) == fc::module_action(fc::rho(op), g));
  }
}

TEST_CASE("diffops: ext, restriction and the cosheaf homomorphism") {
  auto base = points({"a", "b", "c"});
  auto big = pts({0, 1, 2});
  auto small = pts({0, 2});
  fc::Rng rng(30);
  for (int n = 0; n < 50; ++n) {
    auto op = fc::random_diffop(rng, base, small, 1, 2);
    CHECK(fc::rho(fc::ext(op, big)) == fc::ext(fc::rho(op), big));
    CHECK(fc::restrict_op(fc::ext(op, big), small) == op);
  }
  CHECK(fc::ext(fc::DensityDiffOp(base, small, 1), big).is_zero());
}

TEST_CASE("seminorm") {
  auto base = points({"p", "q"});
  auto u = pts({0, 1});
  auto x = fc::EndoDiffOp::identity(base, u, 1, 1);
  FormalFunction f(base, u, 1, 1, {{MultiIndex{0}, values({{0, 3}, {1, -4}})}});
  CHECK(fc::seminorm(f, x) == 4);
  CHECK(fc::seminorm(FormalFunction::zero(base, u, 1, 1), x) == 0);
  fc::Rng rng(2);
  for (int n = 0; n < 30; ++n) {
    auto a = fc::random_function(rng, base, u, 1, 1);
    auto b = fc::random_function(rng, base, u, 1, 1);
    CHECK(fc::seminorm(a + b, x) <= fc::seminorm(a, x) + fc::seminorm(b, x) + 1e-15L);
  }
}
