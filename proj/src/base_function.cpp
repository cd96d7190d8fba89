#include "formalcalc/base_function.hpp"

#include "formalcalc/errors.hpp"

namespace formalcalc {

namespace {

PointValues pruned(PointValues values) {
  for (auto it = values.begin(); it != values.end();) {
    it = it->second.is_zero() ? values.erase(it) : std::next(it);
  }
  return values;
}

}  // namespace

BaseFunction::BaseFunction(PointValues values) : data_(pruned(std::move(values))) {}

BaseFunction BaseFunction::zero(const BaseSpace& base) {
  if (base.is_discrete()) return BaseFunction(PointValues{});
  return BaseFunction(SmoothExpr());
}

BaseFunction BaseFunction::constant(const BaseSpace& base, const Region& domain, const ExactComplex& c) {
  if (!base.is_discrete()) return BaseFunction(SmoothExpr::constant(c));
  PointValues values;
  for (auto i : domain.point_set()) values[i] = c;
  return BaseFunction(std::move(values));
}

const PointValues& BaseFunction::values() const {
  if (!is_discrete()) throw PreconditionError("base function is not discrete");
  return std::get<PointValues>(data_);
}

const SmoothExpr& BaseFunction::expr() const {
  if (is_discrete()) throw PreconditionError("base function is not a smooth expression");
  return std::get<SmoothExpr>(data_);
}

bool BaseFunction::is_zero() const { return is_discrete() ? values().empty() : expr().is_zero(); }

void BaseFunction::require_same_kind(const BaseFunction& o) const {
  if (is_discrete() != o.is_discrete()) throw MismatchError("base functions belong to different base kinds");
}

BaseFunction BaseFunction::operator+(const BaseFunction& o) const {
  require_same_kind(o);
  if (!is_discrete()) return BaseFunction(expr() + o.expr());
  PointValues out = values();
  for (const auto& [p, v] : o.values()) out[p] += v;
  return BaseFunction(std::move(out));
}

BaseFunction BaseFunction::operator-(const BaseFunction& o) const { return *this + o.scaled(-1); }

BaseFunction BaseFunction::operator*(const BaseFunction& o) const {
  require_same_kind(o);
  if (!is_discrete()) return BaseFunction(expr() * o.expr());
  PointValues out;
  for (const auto& [p, v] : values()) {
    if (auto it = o.values().find(p); it != o.values().end()) out[p] = v * it->second;
  }
  return BaseFunction(std::move(out));
}

BaseFunction BaseFunction::scaled(const ExactComplex& c) const {
  if (!is_discrete()) return BaseFunction(SmoothExpr::constant(c) * expr());
  if (c.is_zero()) return BaseFunction(PointValues{});
  PointValues out = values();
  for (auto& [p, v] : out) v *= c;
  return BaseFunction(std::move(out));
}

BaseFunction BaseFunction::derivative(unsigned order) const {
  if (order == 0) return *this;
  if (is_discrete()) throw PreconditionError("x-derivatives do not exist on a discrete base");
  return BaseFunction(expr().derivative(order));
}

Number BaseFunction::evaluate(const Point& p) const {
  if (is_discrete()) {
    auto it = values().find(p.index());
    return it == values().end() ? Number(0) : Number(it->second);
  }
  return expr().evaluate(p.coordinate());
}

BaseFunction BaseFunction::restricted(const Region& region) const {
  if (!is_discrete()) return *this;
  PointValues out;
  for (const auto& [p, v] : values()) {
    if (region.point_set().count(p)) out[p] = v;
  }
  return BaseFunction(std::move(out));
}

BaseFunction BaseFunction::with_support(const Region& support) const {
  if (is_discrete()) return restricted(support);
  return BaseFunction(SmoothExpr::with_support(expr(), support.interval_set()));
}

std::optional<Region> BaseFunction::support() const {
  if (is_discrete()) {
    std::set<std::size_t> pts;
    for (const auto& [p, v] : values()) pts.insert(p);
    return Region::points(std::move(pts));
  }
  auto bound = expr().support_bound();
  if (!bound) return std::nullopt;
  return Region::intervals(*bound);
}

bool BaseFunction::operator==(const BaseFunction& o) const {
  if (is_discrete() != o.is_discrete()) return false;
  if (is_discrete()) return values() == o.values();
  return expr().same_node(o.expr()) || expr().to_sexpr() == o.expr().to_sexpr();
}

BaseDensity::BaseDensity(BaseFunction coefficient) : coefficient_(std::move(coefficient)) {
  if (!coefficient_.is_discrete()) {
    auto bound = coefficient_.expr().support_bound();
    if (!bound || !bound->bounded()) {
      throw SupportError("density on the line needs a bounded support: " + coefficient_.expr().to_sexpr());
    }
  }
}

Region BaseDensity::support() const {
  auto s = coefficient_.support();
  return *s;
}

Number integrate(const BaseDensity& density, const Region& domain, const QuadratureOptions& options) {
  const BaseFunction& c = density.coefficient();
  if (c.is_discrete()) {
    ExactComplex total;
    for (const auto& [p, v] : c.values()) {
      if (domain.point_set().count(p)) total += v;
    }
    return Number(total);
  }
  if (c.is_zero()) return Number(0);
  const SmoothExpr& e = c.expr();
  IntervalSet region = density.support().interval_set().intersect(domain.interval_set());
  if (region.empty()) return Number(0);

  if (auto poly = e.polynomial()) {
    IntervalSet exact_region = poly->support ? region.intersect(*poly->support) : region;
    ExactComplex total;
    for (const auto& iv : exact_region.pieces()) {
      const Rational& lo = iv.lo.value();
      const Rational& hi = iv.hi.value();
      Rational lo_pow = lo;
      Rational hi_pow = hi;
      for (std::size_t n = 0; n < poly->coeffs.size(); ++n) {
        Rational w = (hi_pow - lo_pow) / static_cast<long>(n + 1);
        total += poly->coeffs[n] * ExactComplex(w);
        lo_pow *= lo;
        hi_pow *= hi;
      }
    }
    return Number(total);
  }

  CompiledExpr compiled(e);
  QuadratureOptions piece_options = options;
  piece_options.abs_tol = options.abs_tol / static_cast<Real>(region.pieces().size());
  ComplexReal total(0);
  for (const auto& iv : region.pieces()) {
    auto result = integrate_adaptive([&](Real x) { return compiled(x); }, iv.lo.to_real(), iv.hi.to_real(), piece_options);
    total += result.value;
  }
  return Number(total);
}

}  // namespace formalcalc
