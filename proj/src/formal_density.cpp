#include "formalcalc/formal_density.hpp"

#include <algorithm>

#include "formalcalc/errors.hpp"

namespace formalcalc {

DistributionalBaseDensity::DistributionalBaseDensity(Terms terms) {
  for (auto& [i, tau] : terms) add_term(i, tau);
}

DistributionalBaseDensity DistributionalBaseDensity::single(const MultiIndex& i, BaseDensity tau) {
  DistributionalBaseDensity d;
  d.add_term(i, tau);
  return d;
}

void DistributionalBaseDensity::add_term(const MultiIndex& i, const BaseDensity& tau) {
  if (tau.is_discrete() && !i.is_zero()) {
    throw PreconditionError("derivative stacks do not exist on a discrete base");
  }
  auto it = terms_.find(i);
  if (it == terms_.end()) {
    if (!tau.is_zero()) terms_.emplace(i, tau);
    return;
  }
  it->second = it->second + tau;
  if (it->second.is_zero()) terms_.erase(it);
}

DistributionalBaseDensity DistributionalBaseDensity::operator+(const DistributionalBaseDensity& o) const {
  DistributionalBaseDensity out = *this;
  for (const auto& [i, tau] : o.terms_) out.add_term(i, tau);
  return out;
}

DistributionalBaseDensity DistributionalBaseDensity::scaled(const ExactComplex& c) const {
  DistributionalBaseDensity out;
  if (c.is_zero()) return out;
  for (const auto& [i, tau] : terms_) out.add_term(i, tau.scaled(c));
  return out;
}

FormalDensity::FormalDensity(BasePtr base, Region domain, std::size_t formal_degree, Coeffs coeffs)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree) {
  if (!base_) throw PreconditionError("formal density needs a base space");
  if (domain_.is_discrete() != base_->is_discrete()) throw MismatchError("domain does not match the base kind");
  for (auto& [l, d] : coeffs) {
    if (l.length() != k_) throw MismatchError("density key " + l.to_csv() + " has the wrong length");
    for (const auto& [i, tau] : d.terms()) {
      if (i.length() != base_->dimension()) throw MismatchError("derivative stack has the wrong length");
      if (tau.is_discrete() != base_->is_discrete()) throw MismatchError("density does not match the base kind");
      if (!tau.support().compactly_inside(domain_)) {
        throw SupportError("coefficient support " + tau.support().to_string(*base_) + " is not compact in " +
                           domain_.to_string(*base_));
      }
    }
    if (!d.is_zero()) coeffs_.emplace(l, std::move(d));
  }
}

FormalDensity FormalDensity::zero(BasePtr base, Region domain, std::size_t k) {
  return FormalDensity(std::move(base), std::move(domain), k);
}

FormalDensity FormalDensity::monomial(BasePtr base, Region domain, std::size_t k, const MultiIndex& i,
                                      const MultiIndex& l, BaseDensity tau) {
  Coeffs coeffs;
  coeffs.emplace(l, DistributionalBaseDensity::single(i, std::move(tau)));
  return FormalDensity(std::move(base), std::move(domain), k, std::move(coeffs));
}

unsigned FormalDensity::star_degree() const {
  unsigned r = 0;
  for (const auto& [l, d] : coeffs_) r = std::max(r, static_cast<unsigned>(l.degree()));
  return r;
}

FormalDensity FormalDensity::operator+(const FormalDensity& o) const {
  require_same_base(base_, o.base_);
  if (!(domain_ == o.domain_)) throw MismatchError("densities live on different domains");
  if (k_ != o.k_) throw MismatchError("densities have different formal degrees");
  Coeffs out = coeffs_;
  for (const auto& [l, d] : o.coeffs_) {
    auto it = out.find(l);
    if (it == out.end()) {
      out.emplace(l, d);
    } else {
      it->second = it->second + d;
    }
  }
  return FormalDensity(base_, domain_, k_, std::move(out));
}

FormalDensity FormalDensity::operator-(const FormalDensity& o) const { return *this + o.scaled(-1); }

FormalDensity FormalDensity::scaled(const ExactComplex& c) const {
  Coeffs out;
  for (const auto& [l, d] : coeffs_) out.emplace(l, d.scaled(c));
  return FormalDensity(base_, domain_, k_, std::move(out));
}

FormalDensity FormalDensity::with_domain(Region domain) const {
  FormalDensity out = *this;
  out.domain_ = std::move(domain);
  return out;
}

bool FormalDensity::operator==(const FormalDensity& o) const {
  return base_ == o.base_ && domain_ == o.domain_ && k_ == o.k_ && coeffs_ == o.coeffs_;
}

namespace {

void require_pairable(const FormalDensity& eta, const FormalFunction& u) {
  require_same_base(eta.base(), u.base());
  if (!(eta.domain() == u.domain())) throw MismatchError("density and function live on different domains");
  if (eta.formal_degree() != u.formal_degree()) throw MismatchError("formal degrees differ");
  if (u.trunc() < eta.star_degree()) {
    throw TruncationError("truncation order " + std::to_string(u.trunc()) + " is below the density's y*-degree " +
                          std::to_string(eta.star_degree()));
  }
}

}  // namespace

std::map<MultiIndex, Number> pair_breakdown(const FormalDensity& eta, const FormalFunction& u,
                                            const QuadratureOptions& options) {
  require_pairable(eta, u);
  std::map<MultiIndex, Number> out;
  for (const auto& [l, d] : eta.coeffs()) {
    BaseFunction ul = u.coeff(l);
    Number sum(0);
    for (const auto& [i, tau] : d.terms()) {
      BaseDensity integrand = tau.times(ul.derivative(static_cast<unsigned>(i.degree())));
      sum += integrate(integrand, eta.domain(), options);
    }
    out.emplace(l, sum * Number(Rational(l.factorial())));
  }
  return out;
}

Number pair(const FormalDensity& eta, const FormalFunction& u, const QuadratureOptions& options) {
  Number total(0);
  for (const auto& [l, v] : pair_breakdown(eta, u, options)) total += v;
  return total;
}

namespace detail {

std::vector<LeibnizTerm> leibniz_expand(const BaseDensity& tau, const MultiIndex& i, const MultiIndex& l,
                                        const FormalFunction& f) {
  std::vector<LeibnizTerm> out;
  const mpz_class l_fact = l.factorial();
  for (const auto& b : enumerate_below(l)) {
    MultiIndex a = l - b;
    BaseFunction fa = f.coeff(a);
    if (fa.is_zero()) continue;
    for (const auto& ip : enumerate_below(i)) {
      mpz_class weight = l_fact / b.factorial() * binomial(i, ip);
      BaseFunction factor = fa.derivative(static_cast<unsigned>((i - ip).degree()));
      BaseDensity term = tau.times(factor).scaled(ExactComplex(Rational(weight)));
      if (!term.is_zero()) out.push_back({ip, b, std::move(term)});
    }
  }
  return out;
}

}  // namespace detail

FormalDensity module_action(const FormalDensity& eta, const FormalFunction& f) {
  require_same_base(eta.base(), f.base());
  if (!(eta.domain() == f.domain())) throw MismatchError("density and function live on different domains");
  if (eta.formal_degree() != f.formal_degree()) throw MismatchError("formal degrees differ");
  if (f.trunc() < eta.star_degree()) {
    throw TruncationError("module action needs truncation order >= " + std::to_string(eta.star_degree()));
  }
  FormalDensity::Coeffs out;
  for (const auto& [l, d] : eta.coeffs()) {
    for (const auto& [i, tau] : d.terms()) {
      for (auto& term : detail::leibniz_expand(tau, i, l, f)) out[term.b].add_term(term.i, term.tau);
    }
  }
  return FormalDensity(eta.base(), eta.domain(), eta.formal_degree(), std::move(out));
}

FormalDensity ext(const FormalDensity& eta, const Region& u) {
  const BaseSpace& base = *eta.base();
  if (!eta.domain().subset_of(u)) {
    throw SupportError("extension target " + u.to_string(base) + " does not contain " + eta.domain().to_string(base));
  }
  return FormalDensity(eta.base(), u, eta.formal_degree(), eta.coeffs());
}

FormalDensity cutoff_restrict(const FormalDensity& eta, const SupportedFormalFunction& f, const Region& u) {
  const BaseSpace& base = *eta.base();
  const FormalFunction& ff = f.function();
  if (!u.subset_of(eta.domain())) throw SupportError("cutoff target must lie inside the density's domain");
  if (!f.support().intersect(ff.domain()).subset_of(u)) {
    throw SupportError("supp f = " + f.support().to_string(base) + " is not inside " + u.to_string(base));
  }
  FormalDensity acted = module_action(eta, ff);
  FormalDensity::Coeffs out;
  for (const auto& [l, d] : acted.coeffs()) {
    DistributionalBaseDensity local;
    for (const auto& [i, tau] : d.terms()) {
      if (tau.is_discrete()) {
        local.add_term(i, BaseDensity(tau.coefficient().restricted(u)));
      } else {
        local.add_term(i, tau);
      }
    }
    out.emplace(l, std::move(local));
  }
  return FormalDensity(eta.base(), u, eta.formal_degree(), std::move(out));
}

Region support(const FormalDensity& eta) {
  Region s = Region::nothing(*eta.base());
  for (const auto& [l, d] : eta.coeffs()) {
    for (const auto& [i, tau] : d.terms()) s = s.unite(tau.support());
  }
  return s;
}

}  // namespace formalcalc
