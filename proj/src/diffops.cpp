#include "formalcalc/diffops.hpp"

#include <algorithm>
#include <cmath>

#include "formalcalc/errors.hpp"

namespace formalcalc {

namespace {

void add_density_term(DensityDiffOp::Terms& terms, const OpKey& key, const BaseDensity& tau) {
  auto it = terms.find(key);
  if (it == terms.end()) {
    if (!tau.is_zero()) terms.emplace(key, tau);
    return;
  }
  it->second = it->second + tau;
  if (it->second.is_zero()) terms.erase(it);
}

}  // namespace

DensityDiffOp::DensityDiffOp(BasePtr base, Region domain, std::size_t formal_degree, Terms terms)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree) {
  if (!base_) throw PreconditionError("operator needs a base space");
  if (domain_.is_discrete() != base_->is_discrete()) throw MismatchError("domain does not match the base kind");
  for (auto& [key, tau] : terms) {
    const auto& [i, l] = key;
    if (i.length() != base_->dimension()) throw MismatchError("x-index length does not match base dimension");
    if (l.length() != k_) throw MismatchError("y-index length does not match formal degree");
    if (tau.is_discrete() != base_->is_discrete()) throw MismatchError("coefficient does not match the base kind");
    if (tau.is_zero()) continue;
    if (!tau.support().compactly_inside(domain_)) {
      throw SupportError("operator coefficient support " + tau.support().to_string(*base_) + " is not compact in " +
                         domain_.to_string(*base_));
    }
    add_density_term(terms_, key, tau);
  }
}

unsigned DensityDiffOp::order() const {
  unsigned r = 0;
  for (const auto& [key, tau] : terms_) r = std::max(r, static_cast<unsigned>(key.first.degree() + key.second.degree()));
  return r;
}

unsigned DensityDiffOp::y_order() const {
  unsigned r = 0;
  for (const auto& [key, tau] : terms_) r = std::max(r, static_cast<unsigned>(key.second.degree()));
  return r;
}

Region DensityDiffOp::support() const {
  Region s = Region::nothing(*base_);
  for (const auto& [key, tau] : terms_) s = s.unite(tau.support());
  return s;
}

DensityDiffOp DensityDiffOp::operator+(const DensityDiffOp& o) const {
  require_same_base(base_, o.base_);
  if (!(domain_ == o.domain_) || k_ != o.k_) throw MismatchError("operators live on different domains");
  Terms out = terms_;
  for (const auto& [key, tau] : o.terms_) add_density_term(out, key, tau);
  return DensityDiffOp(base_, domain_, k_, std::move(out));
}

DensityDiffOp DensityDiffOp::scaled(const ExactComplex& c) const {
  Terms out;
  for (const auto& [key, tau] : terms_) add_density_term(out, key, tau.scaled(c));
  return DensityDiffOp(base_, domain_, k_, std::move(out));
}

bool DensityDiffOp::operator==(const DensityDiffOp& o) const {
  return base_ == o.base_ && domain_ == o.domain_ && k_ == o.k_ && terms_ == o.terms_;
}

BaseDensity apply(const DensityDiffOp& d, const FormalFunction& u) {
  require_same_base(d.base(), u.base());
  if (!(d.domain() == u.domain())) throw MismatchError("operator and function live on different domains");
  if (d.formal_degree() != u.formal_degree()) throw MismatchError("formal degrees differ");
  if (u.trunc() < d.y_order()) {
    throw TruncationError("truncation order " + std::to_string(u.trunc()) + " is below the operator's y-order " +
                          std::to_string(d.y_order()));
  }
  BaseDensity total = BaseDensity::zero(*d.base());
  for (const auto& [key, tau] : d.terms()) {
    const auto& [i, l] = key;
    BaseFunction g = u.coeff(l).derivative(static_cast<unsigned>(i.degree()));
    total = total + tau.times(g).scaled(ExactComplex(Rational(l.factorial())));
  }
  return total;
}

DensityDiffOp postcompose_function(const FormalFunction& f, const DensityDiffOp& d) {
  require_same_base(d.base(), f.base());
  if (!(d.domain() == f.domain())) throw MismatchError("operator and function live on different domains");
  BaseFunction f0 = f.coeff(MultiIndex::zero(f.formal_degree()));
  DensityDiffOp::Terms out;
  for (const auto& [key, tau] : d.terms()) add_density_term(out, key, tau.times(f0));
  return DensityDiffOp(d.base(), d.domain(), d.formal_degree(), std::move(out));
}

DensityDiffOp precompose_function(const DensityDiffOp& d, const FormalFunction& f) {
  require_same_base(d.base(), f.base());
  if (!(d.domain() == f.domain())) throw MismatchError("operator and function live on different domains");
  if (d.formal_degree() != f.formal_degree()) throw MismatchError("formal degrees differ");
  if (f.trunc() < d.y_order()) {
    throw TruncationError("precomposition needs truncation order >= " + std::to_string(d.y_order()));
  }
  DensityDiffOp::Terms out;
  for (const auto& [key, tau] : d.terms()) {
    const auto& [i, l] = key;
    for (auto& term : detail::leibniz_expand(tau, i, l, f)) {
      // leibniz_expand produces B! <tau', d^{I'} u_B>; apply() supplies the B! itself.
      add_density_term(out, {term.i, term.b}, term.tau);
    }
  }
  return DensityDiffOp(d.base(), d.domain(), d.formal_degree(), std::move(out));
}

FormalDensity rho(const DensityDiffOp& d) {
  FormalDensity::Coeffs out;
  for (const auto& [key, tau] : d.terms()) out[key.second].add_term(key.first, tau);
  return FormalDensity(d.base(), d.domain(), d.formal_degree(), std::move(out));
}

DensityDiffOp ext(const DensityDiffOp& d, const Region& u) {
  if (!d.domain().subset_of(u)) throw SupportError("extension target does not contain the operator's domain");
  return DensityDiffOp(d.base(), u, d.formal_degree(), d.terms());
}

DensityDiffOp restrict_op(const DensityDiffOp& d, const Region& v) {
  if (!v.subset_of(d.domain())) throw SupportError("restriction target is not inside the operator's domain");
  if (!d.support().compactly_inside(v)) {
    throw SupportError("operator support " + d.support().to_string(*d.base()) + " escapes " + v.to_string(*d.base()));
  }
  return DensityDiffOp(d.base(), v, d.formal_degree(), d.terms());
}

EndoDiffOp::EndoDiffOp(BasePtr base, Region domain, std::size_t formal_degree, Terms terms)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree), terms_(std::move(terms)) {
  for (const auto& [key, c] : terms_) {
    if (key.first.length() != base_->dimension()) throw MismatchError("x-index length does not match base dimension");
    if (key.second.length() != k_) throw MismatchError("y-index length does not match formal degree");
    require_same_base(base_, c.base());
    if (!(c.domain() == domain_)) throw MismatchError("coefficient lives on a different domain");
  }
}

EndoDiffOp EndoDiffOp::identity(BasePtr base, Region domain, std::size_t k, unsigned trunc) {
  Terms terms;
  terms.emplace(OpKey{MultiIndex::zero(base->dimension()), MultiIndex::zero(k)},
                FormalFunction::constant(base, domain, k, trunc, 1));
  return EndoDiffOp(base, domain, k, std::move(terms));
}

unsigned EndoDiffOp::y_order() const {
  unsigned r = 0;
  for (const auto& [key, c] : terms_) r = std::max(r, static_cast<unsigned>(key.second.degree()));
  return r;
}

FormalFunction apply_endo(const EndoDiffOp& x, const FormalFunction& u) {
  require_same_base(x.base(), u.base());
  if (!(x.domain() == u.domain())) throw MismatchError("operator and function live on different domains");
  if (u.trunc() < x.y_order()) throw TruncationError("truncation insufficient for the operator");
  std::optional<FormalFunction> total;
  for (const auto& [key, c] : x.terms()) {
    FormalFunction term = c * u.y_derivative(key.second).x_derivative(key.first);
    total = total ? *total + term : term;
  }
  if (!total) return FormalFunction::zero(u.base(), u.domain(), u.formal_degree(), u.trunc() - x.y_order());
  return *total;
}

Real seminorm(const FormalFunction& u, const EndoDiffOp& x) {
  FormalFunction xu = apply_endo(x, u);
  BaseFunction reduced = xu.coeff(MultiIndex::zero(xu.formal_degree()));
  const BaseSpace& base = *u.base();
  Real best = 0;
  if (base.is_discrete()) {
    for (auto p : u.domain().point_set()) best = std::max(best, reduced.evaluate(Point::discrete(p)).abs());
    return best;
  }
  Region hull_support = Region::nothing(base);
  for (const auto& [key, c] : x.terms()) {
    for (const auto& [j, g] : c.coeffs()) {
      auto s = g.support();
      if (!s || !s->is_compact()) throw SupportError("seminorm operator coefficients must be compactly supported");
      hull_support = hull_support.unite(*s);
    }
  }
  auto hull = hull_support.interval_set().hull();
  if (!hull) return 0;
  const Rational lo = hull->first.value();
  const Rational hi = hull->second.value();
  for (int n = 0; n <= 1000; ++n) {
    Rational at = lo + (hi - lo) * Rational(n) / 1000;
    if (!u.domain().contains(Point::line(at))) continue;
    best = std::max(best, reduced.evaluate(Point::line(at)).abs());
  }
  return best;
}

}  // namespace formalcalc
