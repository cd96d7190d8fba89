#pragma once

#include <map>
#include <utility>

#include "formalcalc/formal_density.hpp"

namespace formalcalc {

/// Key (I, L) of a normal-form term  coeff o d_x^I d_y^L.
using OpKey = std::pair<MultiIndex, MultiIndex>;

/// Compactly supported differential operator from formal functions to
/// densities on U, in normal form  sum tau_{I,L} o d_x^I d_y^L.
class DensityDiffOp {
 public:
  using Terms = std::map<OpKey, BaseDensity>;

  DensityDiffOp(BasePtr base, Region domain, std::size_t formal_degree, Terms terms = {});

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  const Terms& terms() const { return terms_; }

  /// max |I| + |L| over nonzero terms.
  unsigned order() const;
  /// max |L| over nonzero terms.
  unsigned y_order() const;
  /// Union of coefficient supports.
  Region support() const;
  bool is_zero() const { return terms_.empty(); }

  DensityDiffOp operator+(const DensityDiffOp& o) const;
  DensityDiffOp scaled(const ExactComplex& c) const;

  bool operator==(const DensityDiffOp& o) const;

 private:
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  Terms terms_;
};

/// sum tau_{I,L} L! d_x^I u_L: the density D(u) reduced to the base.
BaseDensity apply(const DensityDiffOp& d, const FormalFunction& u);

/// f o D: every coefficient multiplied by the reduction f_0.
DensityDiffOp postcompose_function(const FormalFunction& f, const DensityDiffOp& d);

/// D o f, renormalized so that apply(D o f, u) = apply(D, f u).
DensityDiffOp precompose_function(const DensityDiffOp& d, const FormalFunction& f);

/// rho(sum tau_{I,L} o d_x^I d_y^L) = sum (tau_{I,L} d_x^I) (y*)^L.
FormalDensity rho(const DensityDiffOp& d);

/// Extension by zero from V = domain(D) to U.
DensityDiffOp ext(const DensityDiffOp& d, const Region& u);
/// Restriction to V; requires supp D compact in V.
DensityDiffOp restrict_op(const DensityDiffOp& d, const Region& v);

/// Compactly supported operator from formal functions to formal functions,
/// sum c_{I,L} o d_x^I d_y^L with formal-function coefficients.
class EndoDiffOp {
 public:
  using Terms = std::map<OpKey, FormalFunction>;

  EndoDiffOp(BasePtr base, Region domain, std::size_t formal_degree, Terms terms = {});
  /// The identity operator (one term with coefficient 1 and I = L = 0).
  static EndoDiffOp identity(BasePtr base, Region domain, std::size_t k, unsigned trunc);

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  const Terms& terms() const { return terms_; }
  unsigned y_order() const;

 private:
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  Terms terms_;
};

/// X(u) as a formal function.
FormalFunction apply_endo(const EndoDiffOp& x, const FormalFunction& u);

/// |u|_X = sup_a |X(u)_0(a)|. Exact maximum over points on a discrete base; on
/// the line, maximum over 1001 equally spaced samples of the hull of the
/// coefficient supports of X intersected with the domain (a diagnostic value).
Real seminorm(const FormalFunction& u, const EndoDiffOp& x);

}  // namespace formalcalc
