#include "formalcalc/formal_function.hpp"

#include <algorithm>

#include "formalcalc/errors.hpp"

namespace formalcalc {

FormalFunction::FormalFunction(BasePtr base, Region domain, std::size_t formal_degree, unsigned trunc, Coeffs coeffs)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree), trunc_(trunc) {
  if (!base_) throw PreconditionError("formal function needs a base space");
  if (domain_.is_discrete() != base_->is_discrete()) throw MismatchError("domain does not match the base kind");
  if (!base_->is_discrete() && !domain_.interval_set().is_open()) {
    throw PreconditionError("domain must be open: " + domain_.to_string(*base_));
  }
  for (auto& [j, c] : coeffs) {
    if (j.length() != k_) throw MismatchError("coefficient key " + j.to_csv() + " has the wrong length");
    if (j.degree() > trunc_) {
      throw TruncationError("coefficient key " + j.to_csv() + " exceeds truncation order " + std::to_string(trunc_));
    }
    if (c.is_discrete() != base_->is_discrete()) throw MismatchError("coefficient does not match the base kind");
    if (c.is_zero()) continue;
    if (c.is_discrete()) {
      for (const auto& [p, v] : c.values()) {
        if (!domain_.point_set().count(p)) {
          throw SupportError("coefficient at " + j.to_csv() + " is nonzero at " + base_->labels().at(p) +
                             " outside the domain");
        }
      }
    }
    coeffs_.emplace(j, std::move(c));
  }
}

FormalFunction FormalFunction::zero(BasePtr base, Region domain, std::size_t k, unsigned trunc) {
  return FormalFunction(std::move(base), std::move(domain), k, trunc);
}

FormalFunction FormalFunction::constant(BasePtr base, Region domain, std::size_t k, unsigned trunc,
                                        const ExactComplex& c) {
  BaseFunction g = BaseFunction::constant(*base, domain, c);
  return monomial(std::move(base), std::move(domain), k, trunc, MultiIndex::zero(k), std::move(g));
}

FormalFunction FormalFunction::monomial(BasePtr base, Region domain, std::size_t k, unsigned trunc,
                                        const MultiIndex& j, BaseFunction g) {
  Coeffs coeffs;
  coeffs.emplace(j, std::move(g));
  return FormalFunction(std::move(base), std::move(domain), k, trunc, std::move(coeffs));
}

BaseFunction FormalFunction::coeff(const MultiIndex& j) const {
  if (j.length() != k_) throw MismatchError("multi-index length does not match formal degree");
  if (j.degree() > trunc_) {
    throw TruncationError("coefficient " + j.to_csv() + " requested beyond truncation order " +
                          std::to_string(trunc_));
  }
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? BaseFunction::zero(*base_) : it->second;
}

void FormalFunction::require_compatible(const FormalFunction& o) const {
  require_same_base(base_, o.base_);
  if (!(domain_ == o.domain_)) throw MismatchError("formal functions live on different domains");
  if (k_ != o.k_) throw MismatchError("formal functions have different formal degrees");
}

FormalFunction FormalFunction::operator+(const FormalFunction& o) const {
  require_compatible(o);
  unsigned t = std::min(trunc_, o.trunc_);
  Coeffs out;
  for (const auto& [j, c] : coeffs_) {
    if (j.degree() <= t) out.emplace(j, c);
  }
  for (const auto& [j, c] : o.coeffs_) {
    if (j.degree() > t) continue;
    auto it = out.find(j);
    if (it == out.end()) {
      out.emplace(j, c);
    } else {
      it->second = it->second + c;
    }
  }
  return FormalFunction(base_, domain_, k_, t, std::move(out));
}

FormalFunction FormalFunction::operator-(const FormalFunction& o) const { return *this + o.scaled(-1); }

FormalFunction FormalFunction::scaled(const ExactComplex& c) const {
  Coeffs out;
  for (const auto& [j, g] : coeffs_) out.emplace(j, g.scaled(c));
  return FormalFunction(base_, domain_, k_, trunc_, std::move(out));
}

FormalFunction FormalFunction::operator*(const FormalFunction& o) const {
  require_compatible(o);
  unsigned t = std::min(trunc_, o.trunc_);
  Coeffs out;
  for (const auto& [a, f] : coeffs_) {
    if (a.degree() > t) continue;
    for (const auto& [b, g] : o.coeffs_) {
      if (a.degree() + b.degree() > t) continue;
      MultiIndex j = a + b;
      BaseFunction term = f * g;
      auto it = out.find(j);
      if (it == out.end()) {
        out.emplace(j, std::move(term));
      } else {
        it->second = it->second + term;
      }
    }
  }
  return FormalFunction(base_, domain_, k_, t, std::move(out));
}

FormalFunction FormalFunction::truncated(unsigned t) const {
  if (t > trunc_) throw TruncationError("cannot raise truncation order from " + std::to_string(trunc_));
  Coeffs out;
  for (const auto& [j, c] : coeffs_) {
    if (j.degree() <= t) out.emplace(j, c);
  }
  return FormalFunction(base_, domain_, k_, t, std::move(out));
}

FormalFunction FormalFunction::restrict(const Region& v) const {
  if (!v.subset_of(domain_)) {
    throw SupportError("restriction target " + v.to_string(*base_) + " is not inside " + domain_.to_string(*base_));
  }
  Coeffs out;
  for (const auto& [j, c] : coeffs_) out.emplace(j, c.restricted(v));
  return FormalFunction(base_, v, k_, trunc_, std::move(out));
}

FormalFunction FormalFunction::x_derivative(const MultiIndex& i) const {
  if (i.length() != base_->dimension()) throw MismatchError("x-index length does not match base dimension");
  unsigned order = static_cast<unsigned>(i.degree());
  if (order == 0) return *this;
  Coeffs out;
  for (const auto& [j, c] : coeffs_) out.emplace(j, c.derivative(order));
  return FormalFunction(base_, domain_, k_, trunc_, std::move(out));
}

FormalFunction FormalFunction::y_derivative(const MultiIndex& l) const {
  if (l.length() != k_) throw MismatchError("y-index length does not match formal degree");
  if (l.degree() > trunc_) throw TruncationError("y-derivative of order " + std::to_string(l.degree()) +
                                                 " exceeds truncation order " + std::to_string(trunc_));
  unsigned t = trunc_ - static_cast<unsigned>(l.degree());
  Coeffs out;
  for (const auto& [j, c] : coeffs_) {
    if (!j.dominates(l)) continue;
    MultiIndex rest = j - l;
    if (rest.degree() > t) continue;
    mpz_class w = j.factorial() / rest.factorial();
    out.emplace(rest, c.scaled(ExactComplex(Rational(w))));
  }
  return FormalFunction(base_, domain_, k_, t, std::move(out));
}

bool FormalFunction::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

bool FormalFunction::operator==(const FormalFunction& o) const {
  if (base_ != o.base_ || !(domain_ == o.domain_) || k_ != o.k_ || trunc_ != o.trunc_) return false;
  auto nonzero = [](const Coeffs& c) {
    Coeffs out;
    for (const auto& [j, g] : c) {
      if (!g.is_zero()) out.emplace(j, g);
    }
    return out;
  };
  return nonzero(coeffs_) == nonzero(o.coeffs_);
}

SupportedFormalFunction::SupportedFormalFunction(FormalFunction inner, Region support)
    : inner_(std::move(inner)), support_(std::move(support)) {
  const BaseSpace& base = *inner_.base();
  if (support_.is_discrete() != base.is_discrete()) throw MismatchError("support witness does not match base kind");
  if (!base.is_discrete() && !support_.interval_set().is_closed()) {
    throw SupportError("support witness must be closed: " + support_.to_string(base));
  }
  for (const auto& [j, c] : inner_.coeffs()) {
    if (c.is_zero()) continue;
    auto s = c.support();
    if (!s || !s->intersect(inner_.domain()).subset_of(support_)) {
      throw SupportError("coefficient at " + j.to_csv() + " is not known to vanish outside " + support_.to_string(base));
    }
  }
}

SupportedFormalFunction SupportedFormalFunction::from(FormalFunction inner) {
  Region witness = Region::nothing(*inner.base());
  for (const auto& [j, c] : inner.coeffs()) {
    if (c.is_zero()) continue;
    auto s = c.support();
    if (!s) throw SupportError("coefficient at " + j.to_csv() + " carries no support bound");
    witness = witness.unite(*s);
  }
  if (!witness.is_discrete()) witness = Region::intervals(witness.interval_set().closure());
  return SupportedFormalFunction(std::move(inner), std::move(witness));
}

SupportedFormalFunction SupportedFormalFunction::operator+(const SupportedFormalFunction& o) const {
  return SupportedFormalFunction(inner_ + o.inner_, support_.unite(o.support_));
}

SupportedFormalFunction SupportedFormalFunction::scaled(const ExactComplex& c) const {
  return SupportedFormalFunction(inner_.scaled(c), support_);
}

SupportedFormalFunction extend_by_zero(const SupportedFormalFunction& u, const Region& m) {
  const FormalFunction& f = u.function();
  if (!f.domain().subset_of(m)) throw SupportError("extension target does not contain the domain");
  if (!u.is_compact()) {
    throw SupportError("support " + u.support().to_string(*f.base()) + " is not compact in " +
                       f.domain().to_string(*f.base()));
  }
  FormalFunction::Coeffs out;
  for (const auto& [j, c] : f.coeffs()) out.emplace(j, c.with_support(u.support()));
  return SupportedFormalFunction(FormalFunction(f.base(), m, f.formal_degree(), f.trunc(), std::move(out)),
                                 u.support());
}

SupportedFormalFunction cutoff_product(const SupportedFormalFunction& f, const FormalFunction& u) {
  const FormalFunction& ff = f.function();
  require_same_base(ff.base(), u.base());
  if (ff.formal_degree() != u.formal_degree()) throw MismatchError("formal degrees differ");
  if (!u.domain().subset_of(ff.domain())) throw SupportError("domain of u must lie inside the domain of f");
  Region closed_support = f.support().intersect(ff.domain());
  if (!closed_support.subset_of(u.domain())) {
    throw SupportError("supp f = " + closed_support.to_string(*u.base()) + " is not inside " +
                       u.domain().to_string(*u.base()));
  }
  FormalFunction local = ff.restrict(u.domain()) * u;
  FormalFunction::Coeffs out;
  for (const auto& [j, c] : local.coeffs()) out.emplace(j, c.with_support(f.support()));
  return SupportedFormalFunction(FormalFunction(ff.base(), ff.domain(), ff.formal_degree(), local.trunc(), std::move(out)),
                                 f.support());
}

Number jet(const FormalFunction& u, const Point& a, const MultiIndex& i, const MultiIndex& j) {
  if (!u.domain().contains(a)) throw SupportError("jet point " + a.to_string(*u.base()) + " is outside the domain");
  if (i.length() != u.base()->dimension()) {
    if (u.base()->is_discrete() && !i.is_zero()) {
      throw PreconditionError("x-derivatives do not exist on a discrete base");
    }
    throw MismatchError("x-index length does not match base dimension");
  }
  BaseFunction c = u.coeff(j);
  Number value = c.derivative(static_cast<unsigned>(i.degree())).evaluate(a);
  return value * Number(Rational(j.factorial()));
}

Number ev(const FormalFunction& u, const Point& a) {
  if (!u.domain().contains(a)) throw SupportError("evaluation point " + a.to_string(*u.base()) + " is outside the domain");
  return u.coeff(MultiIndex::zero(u.formal_degree())).evaluate(a);
}

}  // namespace formalcalc
