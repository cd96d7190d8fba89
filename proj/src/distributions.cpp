#include "formalcalc/distributions.hpp"

#include <algorithm>

#include "formalcalc/errors.hpp"

namespace formalcalc {

namespace {

Number factorial_number(const MultiIndex& l) { return Number(Rational(l.factorial())); }

Number sign_power(std::uint64_t n) { return Number(n % 2 == 0 ? 1 : -1); }

Region point_region(const Rational& a) { return Region::intervals(IntervalSet::point(a)); }

EVector zero_vector(std::size_t m) { return EVector(m, Number(0)); }

}  // namespace

// ---------------------------------------------------------------- BaseDistribution

BaseDistribution BaseDistribution::zero(const BaseSpace& base) {
  BaseDistribution t;
  t.discrete_ = base.is_discrete();
  return t;
}

BaseDistribution BaseDistribution::discrete(PointValues weights) {
  BaseDistribution t;
  t.discrete_ = true;
  for (auto& [p, w] : weights) {
    if (!w.is_zero()) t.weights_.emplace(p, std::move(w));
  }
  return t;
}

BaseDistribution BaseDistribution::smooth(SmoothExpr g) {
  BaseDistribution t;
  t.smooth_ = std::move(g);
  return t;
}

BaseDistribution BaseDistribution::point(const Rational& at, unsigned order, Number weight) {
  BaseDistribution t;
  if (!weight.is_zero()) t.points_.emplace(PointKey{at, order}, std::move(weight));
  return t;
}

bool BaseDistribution::is_zero() const { return weights_.empty() && smooth_.is_zero() && points_.empty(); }

BaseDistribution BaseDistribution::operator+(const BaseDistribution& o) const {
  if (discrete_ != o.discrete_) throw MismatchError("base distributions of different kinds");
  BaseDistribution out = *this;
  for (const auto& [p, w] : o.weights_) {
    ExactComplex v = out.weights_[p] + w;
    if (v.is_zero()) {
      out.weights_.erase(p);
    } else {
      out.weights_[p] = v;
    }
  }
  out.smooth_ = smooth_ + o.smooth_;
  for (const auto& [key, w] : o.points_) {
    auto it = out.points_.find(key);
    if (it == out.points_.end()) {
      out.points_.emplace(key, w);
      continue;
    }
    it->second += w;
    if (it->second.is_zero()) out.points_.erase(it);
  }
  return out;
}

BaseDistribution BaseDistribution::scaled(const Number& c) const {
  BaseDistribution out;
  out.discrete_ = discrete_;
  if (c.is_zero()) return out;
  if (!weights_.empty() || !smooth_.is_zero()) {
    if (!c.is_exact()) throw PreconditionError("discrete weights and smooth terms take exact scalars only");
    for (const auto& [p, w] : weights_) out.weights_.emplace(p, w * c.exact());
    out.smooth_ = SmoothExpr::constant(c.exact()) * smooth_;
  }
  for (const auto& [key, w] : points_) out.points_.emplace(key, w * c);
  return out;
}

BaseDistribution BaseDistribution::times(const BaseFunction& f) const {
  if (f.is_discrete() != discrete_) throw MismatchError("function and distribution of different kinds");
  BaseDistribution out;
  out.discrete_ = discrete_;
  if (discrete_) {
    for (const auto& [p, w] : weights_) {
      auto it = f.values().find(p);
      if (it == f.values().end()) continue;
      ExactComplex v = w * it->second;
      if (!v.is_zero()) out.weights_.emplace(p, v);
    }
    return out;
  }
  out.smooth_ = smooth_ * f.expr();
  // (f T)^(i) at a: Leibniz moves derivatives of the test function onto f.
  for (const auto& [key, w] : points_) {
    const auto& [a, i] = key;
    for (unsigned j = 0; j <= i; ++j) {
      Number fv = f.derivative(i - j).evaluate(Point::line(a));
      if (fv.is_zero()) continue;
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), i, j);
      out = out + point(a, j, w * fv * Number(Rational(c)));
    }
  }
  return out;
}

BaseDistribution BaseDistribution::restricted(const Region& v) const {
  BaseDistribution out;
  out.discrete_ = discrete_;
  out.smooth_ = smooth_;
  if (discrete_) {
    for (const auto& [p, w] : weights_) {
      if (v.contains(Point::discrete(p))) out.weights_.emplace(p, w);
    }
  }
  for (const auto& [key, w] : points_) {
    if (v.contains(Point::line(key.first))) out.points_.emplace(key, w);
  }
  return out;
}

BaseDistribution BaseDistribution::with_support(const Region& support) const {
  BaseDistribution out = restricted(support);
  if (!discrete_ && !smooth_.is_zero()) out.smooth_ = SmoothExpr::with_support(smooth_, support.interval_set());
  return out;
}

std::optional<Region> BaseDistribution::support() const {
  if (discrete_) {
    std::set<std::size_t> pts;
    for (const auto& [p, w] : weights_) pts.insert(p);
    return Region::points(std::move(pts));
  }
  IntervalSet s;
  if (!smooth_.is_zero()) {
    auto b = smooth_.support_bound();
    if (!b) return std::nullopt;
    s = *b;
  }
  for (const auto& [key, w] : points_) s = s.unite(IntervalSet::point(key.first));
  return Region::intervals(s);
}

Number BaseDistribution::apply(const BaseFunction& phi, const Region& domain, const QuadratureOptions& options) const {
  if (phi.is_discrete() != discrete_) throw MismatchError("function and distribution of different kinds");
  Number total(0);
  if (discrete_) {
    for (const auto& [p, w] : weights_) {
      if (!domain.contains(Point::discrete(p))) continue;
      total += Number(w) * phi.evaluate(Point::discrete(p));
    }
    return total;
  }
  if (!smooth_.is_zero() && !phi.is_zero()) {
    SmoothExpr integrand = smooth_ * phi.expr();
    auto bound = integrand.support_bound();
    if (!bound || !bound->bounded()) throw SupportError("smooth term meets a test function without compact support");
    total += integrate(BaseDensity(BaseFunction(integrand)), domain, options);
  }
  for (const auto& [key, w] : points_) {
    total += w * phi.derivative(key.second).evaluate(Point::line(key.first));
  }
  return total;
}

Number BaseDistribution::apply(const DistributionalBaseDensity& d, const Region& domain,
                               const QuadratureOptions& options) const {
  Number total(0);
  for (const auto& [i, tau] : d.terms()) {
    const BaseFunction& phi = tau.coefficient();
    if (phi.is_discrete() != discrete_) throw MismatchError("density and distribution of different kinds");
    if (discrete_) {
      total += apply(phi, domain, options);
      continue;
    }
    const unsigned order = static_cast<unsigned>(i.degree());
    if (!smooth_.is_zero()) {
      BaseDensity integrand = tau.times(BaseFunction(smooth_.derivative(order)));
      total += integrate(integrand, domain, options);
    }
    for (const auto& [key, w] : points_) {
      total += w * sign_power(order) * phi.derivative(key.second + order).evaluate(Point::line(key.first));
    }
  }
  return total;
}

// ---------------------------------------------------------------- FormalDistribution

namespace {

void validate_vector(const std::vector<BaseDistribution>& v, std::size_t m, const BaseSpace& base,
                     const Region& domain) {
  if (v.size() != m) throw MismatchError("E-vector has " + std::to_string(v.size()) + " entries, expected " +
                                         std::to_string(m));
  for (const auto& t : v) {
    if (t.is_discrete() != base.is_discrete()) throw MismatchError("coefficient does not match the base kind");
    for (const auto& [p, w] : t.weights()) {
      if (p >= base.point_count() || !domain.contains(Point::discrete(p))) {
        throw SupportError("weight at a point outside " + domain.to_string(base));
      }
    }
    for (const auto& [key, w] : t.point_terms()) {
      if (!domain.contains(Point::line(key.first))) {
        throw SupportError("point term at " + key.first.get_str() + " outside " + domain.to_string(base));
      }
    }
  }
}

bool vector_is_zero(const std::vector<BaseDistribution>& v) {
  return std::all_of(v.begin(), v.end(), [](const BaseDistribution& t) { return t.is_zero(); });
}

std::vector<BaseDistribution> add_vectors(std::vector<BaseDistribution> a, const std::vector<BaseDistribution>& b) {
  for (std::size_t e = 0; e < a.size(); ++e) a[e] = a[e] + b[e];
  return a;
}

}  // namespace

FormalDistribution::FormalDistribution(BasePtr base, Region domain, std::size_t formal_degree, std::size_t e_dim,
                                       Coeffs coeffs)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree), m_(e_dim) {
  if (!base_) throw PreconditionError("formal distribution needs a base space");
  if (m_ == 0) throw PreconditionError("value space dimension must be at least 1");
  if (domain_.is_discrete() != base_->is_discrete()) throw MismatchError("domain does not match the base kind");
  for (auto& [l, v] : coeffs) {
    if (l.length() != k_) throw MismatchError("distribution key " + l.to_csv() + " has the wrong length");
    validate_vector(v, m_, *base_, domain_);
    if (!vector_is_zero(v)) coeffs_.emplace(l, std::move(v));
  }
}

unsigned FormalDistribution::star_degree() const {
  unsigned r = 0;
  for (const auto& [l, v] : coeffs_) r = std::max(r, static_cast<unsigned>(l.degree()));
  return r;
}

FormalDistribution FormalDistribution::operator+(const FormalDistribution& o) const {
  require_same_base(base_, o.base_);
  if (!(domain_ == o.domain_)) throw MismatchError("distributions live on different domains");
  if (k_ != o.k_ || m_ != o.m_) throw MismatchError("distributions have different shapes");
  Coeffs out = coeffs_;
  for (const auto& [l, v] : o.coeffs_) {
    auto it = out.find(l);
    if (it == out.end()) {
      out.emplace(l, v);
    } else {
      it->second = add_vectors(it->second, v);
    }
  }
  return FormalDistribution(base_, domain_, k_, m_, std::move(out));
}

FormalDistribution FormalDistribution::scaled(const Number& c) const {
  Coeffs out;
  for (const auto& [l, v] : coeffs_) {
    std::vector<BaseDistribution> s;
    for (const auto& t : v) s.push_back(t.scaled(c));
    out.emplace(l, std::move(s));
  }
  return FormalDistribution(base_, domain_, k_, m_, std::move(out));
}

FormalDistribution FormalDistribution::component(std::size_t e) const {
  if (e >= m_) throw PreconditionError("component index out of range");
  Coeffs out;
  for (const auto& [l, v] : coeffs_) out.emplace(l, std::vector<BaseDistribution>{v[e]});
  return FormalDistribution(base_, domain_, k_, 1, std::move(out));
}

FormalDistribution FormalDistribution::restrict(const Region& v) const {
  if (!v.subset_of(domain_)) throw SupportError("restriction target is not inside the domain");
  Coeffs out;
  for (const auto& [l, vec] : coeffs_) {
    std::vector<BaseDistribution> r;
    for (const auto& t : vec) r.push_back(t.restricted(v));
    out.emplace(l, std::move(r));
  }
  return FormalDistribution(base_, v, k_, m_, std::move(out));
}

std::optional<Region> FormalDistribution::support() const {
  Region s = Region::nothing(*base_);
  for (const auto& [l, v] : coeffs_) {
    for (const auto& t : v) {
      auto ts = t.support();
      if (!ts) return std::nullopt;
      s = s.unite(*ts);
    }
  }
  return s;
}

// ---------------------------------------------------------------- CompactFormalDistribution

namespace {

FormalDistribution wrap_support(const FormalDistribution& d, const Region& support) {
  FormalDistribution::Coeffs out;
  for (const auto& [l, v] : d.coeffs()) {
    std::vector<BaseDistribution> w;
    for (const auto& t : v) w.push_back(t.with_support(support));
    out.emplace(l, std::move(w));
  }
  return FormalDistribution(d.base(), d.domain(), d.formal_degree(), d.e_dim(), std::move(out));
}

}  // namespace

CompactFormalDistribution::CompactFormalDistribution(FormalDistribution inner, Region support)
    : inner_(FormalDistribution(inner.base(), inner.domain(), inner.formal_degree(), inner.e_dim())),
      support_(std::move(support)) {
  const BaseSpace& base = *inner.base();
  if (!support_.compactly_inside(inner.domain())) {
    throw SupportError("support witness " + support_.to_string(base) + " is not compact in " +
                       inner.domain().to_string(base));
  }
  // Point data outside the witness would contradict it.
  for (const auto& [l, v] : inner.coeffs()) {
    for (const auto& t : v) {
      for (const auto& [p, w] : t.weights()) {
        if (!support_.contains(Point::discrete(p))) throw SupportError("weight outside the support witness");
      }
      for (const auto& [key, w] : t.point_terms()) {
        if (!support_.contains(Point::line(key.first))) throw SupportError("point term outside the support witness");
      }
    }
  }
  inner_ = wrap_support(inner, support_);
}

CompactFormalDistribution CompactFormalDistribution::from(FormalDistribution inner) {
  auto s = inner.support();
  if (!s) throw SupportError("distribution has a smooth term without a support bound");
  Region witness = *s;
  return CompactFormalDistribution(std::move(inner), std::move(witness));
}

// ---------------------------------------------------------------- GeneralizedFunction

GeneralizedFunction::GeneralizedFunction(BasePtr base, Region domain, std::size_t formal_degree, unsigned trunc,
                                         std::size_t e_dim, Coeffs coeffs)
    : base_(std::move(base)), domain_(std::move(domain)), k_(formal_degree), trunc_(trunc), m_(e_dim) {
  if (!base_) throw PreconditionError("generalized function needs a base space");
  if (m_ == 0) throw PreconditionError("value space dimension must be at least 1");
  if (domain_.is_discrete() != base_->is_discrete()) throw MismatchError("domain does not match the base kind");
  for (auto& [j, v] : coeffs) {
    if (j.length() != k_) throw MismatchError("coefficient key " + j.to_csv() + " has the wrong length");
    if (j.degree() > trunc_) throw TruncationError("coefficient key " + j.to_csv() + " exceeds the truncation order");
    validate_vector(v, m_, *base_, domain_);
    if (!vector_is_zero(v)) coeffs_.emplace(j, std::move(v));
  }
}

GeneralizedFunction GeneralizedFunction::embed(const FormalFunction& u) {
  return embed(std::vector<FormalFunction>{u});
}

GeneralizedFunction GeneralizedFunction::embed(const std::vector<FormalFunction>& components) {
  if (components.empty()) throw PreconditionError("embedding needs at least one component");
  const FormalFunction& first = components.front();
  unsigned trunc = first.trunc();
  for (const auto& u : components) {
    require_same_base(first.base(), u.base());
    if (!(u.domain() == first.domain()) || u.formal_degree() != first.formal_degree()) {
      throw MismatchError("embedded components have different shapes");
    }
    trunc = std::min(trunc, u.trunc());
  }
  const BaseSpace& base = *first.base();
  const std::size_t m = components.size();
  Coeffs coeffs;
  for (std::size_t e = 0; e < m; ++e) {
    for (const auto& [j, c] : components[e].coeffs()) {
      if (j.degree() > trunc) continue;
      auto& slot = coeffs[j];
      if (slot.empty()) slot.assign(m, BaseDistribution::zero(base));
      slot[e] = c.is_discrete() ? BaseDistribution::discrete(c.values()) : BaseDistribution::smooth(c.expr());
    }
  }
  return GeneralizedFunction(first.base(), first.domain(), first.formal_degree(), trunc, m, std::move(coeffs));
}

GeneralizedFunction GeneralizedFunction::operator+(const GeneralizedFunction& o) const {
  require_same_base(base_, o.base_);
  if (!(domain_ == o.domain_)) throw MismatchError("generalized functions live on different domains");
  if (k_ != o.k_ || m_ != o.m_) throw MismatchError("generalized functions have different shapes");
  const unsigned t = std::min(trunc_, o.trunc_);
  Coeffs out;
  for (const auto* src : {&coeffs_, &o.coeffs_}) {
    for (const auto& [j, v] : *src) {
      if (j.degree() > t) continue;
      auto it = out.find(j);
      if (it == out.end()) {
        out.emplace(j, v);
      } else {
        it->second = add_vectors(it->second, v);
      }
    }
  }
  return GeneralizedFunction(base_, domain_, k_, t, m_, std::move(out));
}

GeneralizedFunction GeneralizedFunction::scaled(const Number& c) const {
  Coeffs out;
  for (const auto& [j, v] : coeffs_) {
    std::vector<BaseDistribution> s;
    for (const auto& t : v) s.push_back(t.scaled(c));
    out.emplace(j, std::move(s));
  }
  return GeneralizedFunction(base_, domain_, k_, trunc_, m_, std::move(out));
}

GeneralizedFunction GeneralizedFunction::component(std::size_t e) const {
  if (e >= m_) throw PreconditionError("component index out of range");
  Coeffs out;
  for (const auto& [j, v] : coeffs_) out.emplace(j, std::vector<BaseDistribution>{v[e]});
  return GeneralizedFunction(base_, domain_, k_, trunc_, 1, std::move(out));
}

GeneralizedFunction GeneralizedFunction::restrict(const Region& v) const {
  if (!v.subset_of(domain_)) throw SupportError("restriction target is not inside the domain");
  Coeffs out;
  for (const auto& [j, vec] : coeffs_) {
    std::vector<BaseDistribution> r;
    for (const auto& t : vec) r.push_back(t.restricted(v));
    out.emplace(j, std::move(r));
  }
  return GeneralizedFunction(base_, v, k_, trunc_, m_, std::move(out));
}

GeneralizedFunction GeneralizedFunction::times(const FormalFunction& f) const {
  require_same_base(base_, f.base());
  if (!(f.domain() == domain_)) throw MismatchError("function and generalized function live on different domains");
  if (f.formal_degree() != k_) throw MismatchError("formal degrees differ");
  const unsigned t = std::min(trunc_, f.trunc());
  Coeffs out;
  for (const auto& [j, v] : coeffs_) {
    for (const auto& [a, fa] : f.coeffs()) {
      MultiIndex sum = j + a;
      if (sum.degree() > t) continue;
      auto& slot = out[sum];
      if (slot.empty()) slot.assign(m_, BaseDistribution::zero(*base_));
      for (std::size_t e = 0; e < m_; ++e) slot[e] = slot[e] + v[e].times(fa);
    }
  }
  return GeneralizedFunction(base_, domain_, k_, t, m_, std::move(out));
}

GeneralizedFunction GeneralizedFunction::extend_by_zero(const Region& support, const Region& m) const {
  if (!domain_.subset_of(m)) throw SupportError("extension target does not contain the domain");
  if (!support.intersect(m).subset_of(domain_)) throw SupportError("support witness meets M outside the domain");
  Coeffs out;
  for (const auto& [j, v] : coeffs_) {
    std::vector<BaseDistribution> w;
    for (const auto& t : v) {
      auto ts = t.support();
      if (ts && !ts->intersect(domain_).subset_of(support)) {
        throw SupportError("coefficient support exceeds the witness");
      }
      w.push_back(t.with_support(support));
    }
    out.emplace(j, std::move(w));
  }
  return GeneralizedFunction(base_, m, k_, trunc_, m_, std::move(out));
}

// ---------------------------------------------------------------- PointDistribution

PointDistribution::PointDistribution(BasePtr base, Point at, std::size_t formal_degree, std::size_t e_dim,
                                     Terms terms)
    : base_(std::move(base)), at_(std::move(at)), k_(formal_degree), m_(e_dim) {
  if (!base_) throw PreconditionError("point distribution needs a base space");
  if (m_ == 0) throw PreconditionError("value space dimension must be at least 1");
  if (at_.is_discrete() != base_->is_discrete()) throw MismatchError("point does not match the base kind");
  for (auto& [key, c] : terms) {
    const auto& [i, j] = key;
    if (i.length() != base_->dimension() || j.length() != k_) throw MismatchError("term index has the wrong length");
    if (c.size() != m_) throw MismatchError("coefficient has the wrong E-dimension");
    if (std::all_of(c.begin(), c.end(), [](const ExactComplex& z) { return z.is_zero(); })) continue;
    terms_.emplace(key, std::move(c));
  }
}

PointDistribution PointDistribution::basis(BasePtr base, Point at, std::size_t k, const MultiIndex& i,
                                           const MultiIndex& j) {
  Terms t;
  t.emplace(std::make_pair(i, j), std::vector<ExactComplex>{ExactComplex(1)});
  return PointDistribution(std::move(base), std::move(at), k, 1, std::move(t));
}

unsigned PointDistribution::y_order() const {
  unsigned r = 0;
  for (const auto& [key, c] : terms_) r = std::max(r, static_cast<unsigned>(key.second.degree()));
  return r;
}

// ---------------------------------------------------------------- operations

EVector apply_dist(const FormalDistribution& eta, const SupportedFormalFunction& u,
                   const QuadratureOptions& options) {
  const FormalFunction& f = u.function();
  require_same_base(eta.base(), f.base());
  if (!(eta.domain() == f.domain())) throw MismatchError("distribution and function live on different domains");
  if (eta.formal_degree() != f.formal_degree()) throw MismatchError("formal degrees differ");
  if (f.trunc() < eta.star_degree()) {
    throw TruncationError("truncation order " + std::to_string(f.trunc()) + " is below the distribution's y*-degree " +
                          std::to_string(eta.star_degree()));
  }
  if (!u.is_compact()) {
    auto s = eta.support();
    if (!s || !s->compactly_inside(eta.domain())) {
      throw SupportError("neither the function nor the distribution has compact support");
    }
  }
  EVector out = zero_vector(eta.e_dim());
  for (const auto& [l, v] : eta.coeffs()) {
    BaseFunction ul = f.coeff(l);
    if (ul.is_zero()) continue;
    const Number w = factorial_number(l);
    for (std::size_t e = 0; e < v.size(); ++e) out[e] += w * v[e].apply(ul, eta.domain(), options);
  }
  return out;
}

EVector apply_gen(const GeneralizedFunction& u, const FormalDensity& eta, const QuadratureOptions& options) {
  require_same_base(u.base(), eta.base());
  if (!(u.domain() == eta.domain())) throw MismatchError("generalized function and density live on different domains");
  if (u.formal_degree() != eta.formal_degree()) throw MismatchError("formal degrees differ");
  if (eta.star_degree() > u.trunc()) {
    throw TruncationError("truncation order " + std::to_string(u.trunc()) + " is below the density's y*-degree " +
                          std::to_string(eta.star_degree()));
  }
  EVector out = zero_vector(u.e_dim());
  for (const auto& [l, d] : eta.coeffs()) {
    auto it = u.coeffs().find(l);
    if (it == u.coeffs().end()) continue;
    const Number w = factorial_number(l);
    for (std::size_t e = 0; e < u.e_dim(); ++e) out[e] += w * it->second[e].apply(d, eta.domain(), options);
  }
  return out;
}

FormalDistribution module_action_dist(const FormalDistribution& eta, const FormalFunction& f) {
  require_same_base(eta.base(), f.base());
  if (!(eta.domain() == f.domain())) throw MismatchError("distribution and function live on different domains");
  if (eta.formal_degree() != f.formal_degree()) throw MismatchError("formal degrees differ");
  if (f.trunc() < eta.star_degree()) {
    throw TruncationError("module action needs truncation order >= " + std::to_string(eta.star_degree()));
  }
  const BaseSpace& base = *eta.base();
  FormalDistribution::Coeffs out;
  for (const auto& [l, v] : eta.coeffs()) {
    const mpz_class l_fact = l.factorial();
    for (const auto& b : enumerate_below(l)) {
      BaseFunction fa = f.coeff(l - b);
      if (fa.is_zero()) continue;
      const Number w(Rational(l_fact / b.factorial()));
      auto& slot = out[b];
      if (slot.empty()) slot.assign(eta.e_dim(), BaseDistribution::zero(base));
      for (std::size_t e = 0; e < v.size(); ++e) slot[e] = slot[e] + v[e].times(fa).scaled(w);
    }
  }
  return FormalDistribution(eta.base(), eta.domain(), eta.formal_degree(), eta.e_dim(), std::move(out));
}

CompactFormalDistribution ext(const CompactFormalDistribution& eta, const Region& m) {
  const FormalDistribution& d = eta.distribution();
  if (!d.domain().subset_of(m)) {
    throw SupportError("extension target " + m.to_string(*d.base()) + " does not contain " +
                       d.domain().to_string(*d.base()));
  }
  return CompactFormalDistribution(FormalDistribution(d.base(), m, d.formal_degree(), d.e_dim(), d.coeffs()),
                                   eta.support());
}

FormalDistribution extend_by_zero(const FormalDistribution& eta, const Region& support, const Region& m) {
  if (!eta.domain().subset_of(m)) throw SupportError("extension target does not contain the domain");
  if (!support.intersect(m).subset_of(eta.domain())) throw SupportError("support witness meets M outside the domain");
  FormalDistribution::Coeffs out;
  for (const auto& [l, v] : eta.coeffs()) {
    std::vector<BaseDistribution> w;
    for (const auto& t : v) {
      auto ts = t.support();
      if (ts && !ts->intersect(eta.domain()).subset_of(support)) {
        throw SupportError("coefficient support exceeds the witness");
      }
      w.push_back(t.with_support(support));
    }
    out.emplace(l, std::move(w));
  }
  return FormalDistribution(eta.base(), m, eta.formal_degree(), eta.e_dim(), std::move(out));
}

CompactFormalDistribution cutoff_restrict(const CompactFormalDistribution& eta, const SupportedFormalFunction& f,
                                          const Region& u) {
  const FormalDistribution& d = eta.distribution();
  const BaseSpace& base = *d.base();
  const FormalFunction& ff = f.function();
  if (!u.subset_of(d.domain())) throw SupportError("cutoff target must lie inside the distribution's domain");
  Region closed_support = f.support().intersect(ff.domain());
  if (!closed_support.subset_of(u)) {
    throw SupportError("supp f = " + closed_support.to_string(base) + " is not inside " + u.to_string(base));
  }
  FormalDistribution acted = module_action_dist(d, ff).restrict(u);
  Region witness = eta.support().intersect(closed_support);
  if (!base.is_discrete()) witness = Region::intervals(witness.interval_set().closure());
  return CompactFormalDistribution(std::move(acted), std::move(witness));
}

EVector ExtendedDistribution::operator()(const FormalFunction& u, const QuadratureOptions& options) const {
  SupportedFormalFunction fu = cutoff_product(cutoff_, u);
  CompactFormalDistribution global = ext(eta_, fu.function().domain());
  return apply_dist(global.distribution(), fu, options);
}

ExtendedDistribution cutoff_extend(const CompactFormalDistribution& eta, const SupportedFormalFunction& f,
                                   const Region& plateau) {
  const FormalDistribution& d = eta.distribution();
  const FormalFunction& ff = f.function();
  const BaseSpace& base = *d.base();
  require_same_base(d.base(), ff.base());
  if (d.formal_degree() != ff.formal_degree()) throw MismatchError("formal degrees differ");
  if (!d.domain().subset_of(ff.domain())) throw SupportError("the cutoff must live on a set containing supp eta");
  if (!f.is_compact()) throw SupportError("the cutoff must have compact support");
  if (ff.trunc() < d.star_degree()) throw TruncationError("cutoff truncation is below the distribution's y*-degree");
  if (!plateau.subset_of(ff.domain())) throw SupportError("plateau is not inside the cutoff's domain");
  if (!eta.support().subset_of(plateau)) {
    throw SupportError("plateau " + plateau.to_string(base) + " does not contain supp eta = " +
                       eta.support().to_string(base));
  }
  if (base.is_discrete()) {
    for (auto p : plateau.point_set()) {
      for (const auto& j : enumerate_upto(ff.formal_degree(), ff.trunc())) {
        Number v = ff.coeff(j).evaluate(Point::discrete(p));
        const bool ok = j.is_zero() ? v == Number(1) : v.is_zero();
        if (!ok) throw SupportError("cutoff is not 1 at " + base.labels()[p]);
      }
    }
  } else {
    const IntervalSet& pl = plateau.interval_set();
    if (!pl.is_open()) throw SupportError("plateau must be open");
    const IntervalSet& s = eta.support().interval_set();
    for (const auto& piece : pl.pieces()) {
      if (s.intersect(IntervalSet::closed(piece.lo, piece.hi)).empty()) continue;
      Rational lo = piece.lo.is_finite() ? piece.lo.value() : s.pieces().front().lo.value() - 1;
      Rational hi = piece.hi.is_finite() ? piece.hi.value() : s.pieces().back().hi.value() + 1;
      for (int n = 1; n < 100; ++n) {
        Rational at = lo + (hi - lo) * Rational(n) / 100;
        for (const auto& [j, c] : ff.coeffs()) {
          Number v = c.evaluate(Point::line(at));
          Real err = j.is_zero() ? distance(v, Number(1)) : v.abs();
          if (err > 1e-12L) throw SupportError("cutoff is not 1 on the plateau near " + at.get_str());
        }
      }
    }
  }
  return ExtendedDistribution(eta, f);
}

EVector point_apply(const PointDistribution& eta, const FormalFunction& u) {
  require_same_base(eta.base(), u.base());
  if (eta.formal_degree() != u.formal_degree()) throw MismatchError("formal degrees differ");
  if (eta.y_order() > u.trunc()) throw TruncationError("point distribution needs truncation order >= " +
                                                       std::to_string(eta.y_order()));
  EVector out = zero_vector(eta.e_dim());
  for (const auto& [key, c] : eta.terms()) {
    Number j = jet(u, eta.at(), key.first, key.second);
    for (std::size_t e = 0; e < c.size(); ++e) out[e] += Number(c[e]) * j;
  }
  return out;
}

CompactFormalDistribution to_compact(const PointDistribution& eta) {
  const BaseSpace& base = *eta.base();
  FormalDistribution::Coeffs coeffs;
  for (const auto& [key, c] : eta.terms()) {
    const auto& [i, j] = key;
    auto& slot = coeffs[j];
    if (slot.empty()) slot.assign(eta.e_dim(), BaseDistribution::zero(base));
    for (std::size_t e = 0; e < c.size(); ++e) {
      BaseDistribution t = base.is_discrete()
                               ? BaseDistribution::discrete(PointValues{{eta.at().index(), c[e]}})
                               : BaseDistribution::point(eta.at().coordinate(), static_cast<unsigned>(i.degree()), c[e]);
      slot[e] = slot[e] + t;
    }
  }
  Region witness = base.is_discrete() ? Region::points({eta.at().index()}) : point_region(eta.at().coordinate());
  return CompactFormalDistribution(
      FormalDistribution(eta.base(), Region::whole(base), eta.formal_degree(), eta.e_dim(), std::move(coeffs)),
      std::move(witness));
}

bool jet_kernel_check(const FormalFunction& u, const Point& a, unsigned r) {
  if (u.trunc() < r) throw TruncationError("jet kernel check needs truncation order >= " + std::to_string(r));
  if (r == 0) return true;
  const std::size_t n = u.base()->dimension();
  for (const auto& j : enumerate_upto(u.formal_degree(), r - 1)) {
    for (const auto& i : enumerate_upto(n, r - 1 - static_cast<std::uint32_t>(j.degree()))) {
      if (!jet(u, a, i, j).is_zero()) return false;
    }
  }
  return true;
}

std::size_t dist_space_dimension(std::size_t n, std::size_t k, unsigned r) {
  std::size_t count = 0;
  for (const auto& j : enumerate_upto(k, r)) count += enumerate_upto(n, r - static_cast<std::uint32_t>(j.degree())).size();
  return count;
}

}  // namespace formalcalc
