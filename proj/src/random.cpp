#include "formalcalc/random.hpp"

#include "formalcalc/errors.hpp"
#include "formalcalc/families.hpp"

namespace formalcalc {

Rational Rng::small_rational() {
  Rational r(uniform(-6, 6), uniform(1, 3));
  r.canonicalize();
  return r;
}

ExactComplex Rng::small_complex() {
  Rational re = small_rational();
  if (chance(1, 4)) return ExactComplex(re, small_rational());
  return ExactComplex(re);
}

Region random_point_subset(Rng& rng, const BaseSpace& base) {
  std::set<std::size_t> pts;
  for (std::size_t p = 0; p < base.point_count(); ++p) {
    if (rng.chance(1, 2)) pts.insert(p);
  }
  if (pts.empty()) pts.insert(static_cast<std::size_t>(rng.uniform(0, static_cast<int>(base.point_count()) - 1)));
  return Region::points(std::move(pts));
}

namespace {

PointValues random_values(Rng& rng, const Region& u) {
  PointValues v;
  for (auto p : u.point_set()) {
    if (rng.chance(2, 3)) {
      ExactComplex z = rng.small_complex();
      if (!z.is_zero()) v.emplace(p, z);
    }
  }
  return v;
}

SmoothExpr random_polynomial(Rng& rng) {
  SmoothExpr p;
  SmoothExpr power = SmoothExpr::constant(1);
  const int degree = rng.uniform(0, 2);
  for (int d = 0; d <= degree; ++d) {
    p = p + SmoothExpr::constant(rng.small_complex()) * power;
    power = power * SmoothExpr::x();
  }
  return p;
}

ProbeBump random_bump(Rng& rng, const Region& u) {
  const auto bumps = probe_bumps(u.interval_set());
  if (bumps.empty()) throw PreconditionError("open set too small for a probe bump");
  return bumps[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(bumps.size()) - 1))];
}

Rational random_point_in(Rng& rng, const Region& u) {
  const ProbeBump b = random_bump(rng, u);
  const int n = rng.uniform(0, 4);
  return b.a + (b.d - b.a) * Rational(n + 1) / 6;
}

BaseDistribution random_base_distribution(Rng& rng, const BasePtr& base, const Region& u, bool compact) {
  if (base->is_discrete()) return BaseDistribution::discrete(random_values(rng, u));
  BaseDistribution t = BaseDistribution::zero(*base);
  if (rng.chance(2, 3)) {
    SmoothExpr g = random_polynomial(rng);
    if (compact) g = g * random_bump(rng, u).expr();
    t = t + BaseDistribution::smooth(g);
  }
  if (rng.chance(1, 2)) {
    t = t + BaseDistribution::point(random_point_in(rng, u), static_cast<unsigned>(rng.uniform(0, 1)),
                                    Number(rng.small_complex()));
  }
  return t;
}

}  // namespace

BaseFunction random_base_function(Rng& rng, const BasePtr& base, const Region& u) {
  if (base->is_discrete()) return BaseFunction(random_values(rng, u));
  return BaseFunction(random_polynomial(rng));
}

BaseFunction random_compact_base_function(Rng& rng, const BasePtr& base, const Region& u) {
  if (base->is_discrete()) return BaseFunction(random_values(rng, u));
  return BaseFunction(random_polynomial(rng) * random_bump(rng, u).expr());
}

FormalFunction random_function(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned trunc) {
  FormalFunction::Coeffs c;
  for (const auto& j : enumerate_upto(k, trunc)) {
    if (rng.chance(1, 2)) c.emplace(j, random_base_function(rng, base, u));
  }
  return FormalFunction(base, u, k, trunc, std::move(c));
}

SupportedFormalFunction random_compact_function(Rng& rng, const BasePtr& base, const Region& u, std::size_t k,
                                                unsigned trunc) {
  FormalFunction::Coeffs c;
  for (const auto& j : enumerate_upto(k, trunc)) {
    if (rng.chance(1, 2)) c.emplace(j, random_compact_base_function(rng, base, u));
  }
  FormalFunction f(base, u, k, trunc, std::move(c));
  if (base->is_discrete()) return SupportedFormalFunction(f, u);
  return SupportedFormalFunction::from(f);
}

FormalDensity random_density(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r) {
  FormalDensity::Coeffs c;
  const std::uint32_t max_stack = base->is_discrete() ? 0 : 1;
  for (const auto& l : enumerate_upto(k, r)) {
    if (!rng.chance(1, 2)) continue;
    DistributionalBaseDensity d;
    for (std::uint32_t s = 0; s <= max_stack; ++s) {
      if (s > 0 && !rng.chance(1, 2)) continue;
      MultiIndex i = base->is_discrete() ? MultiIndex(0) : MultiIndex{s};
      d.add_term(i, BaseDensity(random_compact_base_function(rng, base, u)));
    }
    c.emplace(l, std::move(d));
  }
  return FormalDensity(base, u, k, std::move(c));
}

DensityDiffOp random_diffop(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r) {
  DensityDiffOp::Terms t;
  const std::uint32_t max_stack = base->is_discrete() ? 0 : 1;
  for (const auto& l : enumerate_upto(k, r)) {
    for (std::uint32_t s = 0; s <= max_stack; ++s) {
      if (!rng.chance(1, 2)) continue;
      MultiIndex i = base->is_discrete() ? MultiIndex(0) : MultiIndex{s};
      t.emplace(OpKey{i, l}, BaseDensity(random_compact_base_function(rng, base, u)));
    }
  }
  return DensityDiffOp(base, u, k, std::move(t));
}

FormalDistribution random_distribution(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r,
                                       std::size_t m) {
  FormalDistribution::Coeffs c;
  for (const auto& l : enumerate_upto(k, r)) {
    if (!rng.chance(1, 2)) continue;
    std::vector<BaseDistribution> v;
    for (std::size_t e = 0; e < m; ++e) v.push_back(random_base_distribution(rng, base, u, true));
    c.emplace(l, std::move(v));
  }
  return FormalDistribution(base, u, k, m, std::move(c));
}

GeneralizedFunction random_generalized(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned trunc,
                                       std::size_t m) {
  GeneralizedFunction::Coeffs c;
  for (const auto& j : enumerate_upto(k, trunc)) {
    if (!rng.chance(1, 2)) continue;
    std::vector<BaseDistribution> v;
    for (std::size_t e = 0; e < m; ++e) v.push_back(random_base_distribution(rng, base, u, false));
    c.emplace(j, std::move(v));
  }
  return GeneralizedFunction(base, u, k, trunc, m, std::move(c));
}

PointDistribution random_point_distribution(Rng& rng, const BasePtr& base, const Point& a, std::size_t k, unsigned r,
                                            std::size_t m) {
  PointDistribution::Terms t;
  const std::size_t n = base->dimension();
  for (const auto& j : enumerate_upto(k, r)) {
    for (const auto& i : enumerate_upto(n, r - static_cast<std::uint32_t>(j.degree()))) {
      if (!rng.chance(1, 3)) continue;
      std::vector<ExactComplex> c;
      for (std::size_t e = 0; e < m; ++e) c.push_back(rng.small_complex());
      t.emplace(std::make_pair(i, j), std::move(c));
    }
  }
  return PointDistribution(base, a, k, m, std::move(t));
}

}  // namespace formalcalc
