#pragma once

#include <map>

#include "formalcalc/base_function.hpp"
#include "formalcalc/multi_index.hpp"

namespace formalcalc {

/// Truncated formal power series sum_J f_J y^J in k formal variables with
/// smooth coefficients on an open set U of the base. Coefficients of degree
/// <= trunc() are exact; higher ones are unknown. Absent keys mean zero.
class FormalFunction {
 public:
  using Coeffs = std::map<MultiIndex, BaseFunction>;

  FormalFunction(BasePtr base, Region domain, std::size_t formal_degree, unsigned trunc, Coeffs coeffs = {});

  static FormalFunction zero(BasePtr base, Region domain, std::size_t k, unsigned trunc);
  static FormalFunction constant(BasePtr base, Region domain, std::size_t k, unsigned trunc, const ExactComplex& c);
  /// g * y^J.
  static FormalFunction monomial(BasePtr base, Region domain, std::size_t k, unsigned trunc, const MultiIndex& j,
                                 BaseFunction g);

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  unsigned trunc() const { return trunc_; }
  const Coeffs& coeffs() const { return coeffs_; }
  /// Coefficient at J (zero when absent); throws TruncationError past trunc().
  BaseFunction coeff(const MultiIndex& j) const;

  FormalFunction operator+(const FormalFunction& o) const;
  FormalFunction operator-(const FormalFunction& o) const;
  FormalFunction scaled(const ExactComplex& c) const;
  FormalFunction operator-() const { return scaled(-1); }
  /// Truncated Cauchy product in y.
  FormalFunction operator*(const FormalFunction& o) const;

  /// Drops coefficients above degree t (t <= trunc()).
  FormalFunction truncated(unsigned t) const;
  /// Coefficients restricted to V; V must be contained in the domain.
  FormalFunction restrict(const Region& v) const;

  /// d^I/dx^I applied to every coefficient.
  FormalFunction x_derivative(const MultiIndex& i) const;
  /// d^L/dy^L; the result is exact up to trunc() - |L|.
  FormalFunction y_derivative(const MultiIndex& l) const;

  bool is_zero() const;
  bool operator==(const FormalFunction& o) const;

 private:
  void require_compatible(const FormalFunction& o) const;
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  unsigned trunc_;
  Coeffs coeffs_;
};

/// A formal function whose coefficients vanish outside a closed witness set.
/// Sections of the compactly supported cosheaf use compact witnesses inside
/// the domain; partition-of-unity members may have witnesses closed in the domain only.
class SupportedFormalFunction {
 public:
  SupportedFormalFunction(FormalFunction inner, Region support);
  /// Witness read off from the coefficients; throws SupportError when a line
  /// coefficient carries no support bound.
  static SupportedFormalFunction from(FormalFunction inner);

  const FormalFunction& function() const { return inner_; }
  const Region& support() const { return support_; }
  /// Witness compact and contained in the domain.
  bool is_compact() const { return support_.compactly_inside(inner_.domain()); }

  SupportedFormalFunction operator+(const SupportedFormalFunction& o) const;
  SupportedFormalFunction scaled(const ExactComplex& c) const;

 private:
  FormalFunction inner_;
  Region support_;
};

/// The extension by zero of u to M (domain(u) inside M, compact support).
SupportedFormalFunction extend_by_zero(const SupportedFormalFunction& u, const Region& m);

/// The global section f u: equal to f|_U u on U and to 0 off supp f.
/// Requires supp f (closed in domain(f)) inside U = domain(u) inside domain(f).
SupportedFormalFunction cutoff_product(const SupportedFormalFunction& f, const FormalFunction& u);

/// (d_x^I d_y^J u)(a) = J! (d_x^I u_J)(a).
Number jet(const FormalFunction& u, const Point& a, const MultiIndex& i, const MultiIndex& j);

/// u_0(a), the value of the reduction at a.
Number ev(const FormalFunction& u, const Point& a);

}  // namespace formalcalc
