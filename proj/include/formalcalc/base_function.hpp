#pragma once

#include <map>
#include <optional>
#include <variant>

#include "formalcalc/base_space.hpp"
#include "formalcalc/quadrature.hpp"
#include "formalcalc/smooth_expr.hpp"

namespace formalcalc {

/// Sparse point -> value map; absent points carry zero.
using PointValues = std::map<std::size_t, ExactComplex>;

/// A smooth (complex-valued) function on an open subset of N.
/// Discrete base: a finitely supported point map. Line: a SmoothExpr.
class BaseFunction {
 public:
  BaseFunction() = default;
  explicit BaseFunction(PointValues values);
  explicit BaseFunction(SmoothExpr expr) : data_(std::move(expr)) {}

  static BaseFunction zero(const BaseSpace& base);
  /// The constant c on `domain` (discrete: explicit values on its points).
  static BaseFunction constant(const BaseSpace& base, const Region& domain, const ExactComplex& c);

  bool is_discrete() const { return std::holds_alternative<PointValues>(data_); }
  const PointValues& values() const;
  const SmoothExpr& expr() const;

  /// Exact structural zero (sound; may miss zeros of unsimplified expressions).
  bool is_zero() const;

  BaseFunction operator+(const BaseFunction& o) const;
  BaseFunction operator-(const BaseFunction& o) const;
  BaseFunction operator*(const BaseFunction& o) const;
  BaseFunction scaled(const ExactComplex& c) const;

  /// x-derivative of the given order; discrete bases admit order 0 only.
  BaseFunction derivative(unsigned order) const;
  Number evaluate(const Point& p) const;

  /// Drops values outside `region` (discrete) / unchanged expression (line).
  BaseFunction restricted(const Region& region) const;
  /// Declares that the function vanishes outside the closed `support`.
  BaseFunction with_support(const Region& support) const;
  /// Closed set outside of which the function vanishes, when known.
  std::optional<Region> support() const;

  bool operator==(const BaseFunction& o) const;

 private:
  void require_same_kind(const BaseFunction& o) const;
  std::variant<PointValues, SmoothExpr> data_;
};

/// A compactly supported smooth density on an open subset of N, stored as its
/// coefficient against counting measure (discrete) or |dx| (line).
class BaseDensity {
 public:
  BaseDensity() = default;
  /// Line coefficients must carry a bounded support bound.
  explicit BaseDensity(BaseFunction coefficient);

  static BaseDensity zero(const BaseSpace& base) { return BaseDensity(BaseFunction::zero(base)); }

  const BaseFunction& coefficient() const { return coefficient_; }
  bool is_zero() const { return coefficient_.is_zero(); }
  bool is_discrete() const { return coefficient_.is_discrete(); }

  BaseDensity operator+(const BaseDensity& o) const { return BaseDensity(coefficient_ + o.coefficient_); }
  BaseDensity operator-(const BaseDensity& o) const { return BaseDensity(coefficient_ - o.coefficient_); }
  BaseDensity scaled(const ExactComplex& c) const { return BaseDensity(coefficient_.scaled(c)); }
  /// The density g * tau.
  BaseDensity times(const BaseFunction& g) const { return BaseDensity(coefficient_ * g); }

  /// Compact support witness.
  Region support() const;

  bool operator==(const BaseDensity& o) const { return coefficient_ == o.coefficient_; }

 private:
  BaseFunction coefficient_;
};

/// Integral of `density` over the open set `domain`.
/// Discrete: exact sum. Line: exact antiderivative for polynomial coefficients,
/// adaptive quadrature otherwise.
Number integrate(const BaseDensity& density, const Region& domain, const QuadratureOptions& options = {});

}  // namespace formalcalc
