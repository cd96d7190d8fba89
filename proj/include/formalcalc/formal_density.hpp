#pragma once

#include <map>
#include <vector>

#include "formalcalc/formal_function.hpp"

namespace formalcalc {

/// Finite sum  sum_I tau_I d_x^I  of compactly supported base densities with
/// derivative stacks, acting on smooth g by  sum_I <tau_I, d_x^I g>.
/// Terms with equal I are merged; zero terms are dropped.
class DistributionalBaseDensity {
 public:
  using Terms = std::map<MultiIndex, BaseDensity>;

  DistributionalBaseDensity() = default;
  explicit DistributionalBaseDensity(Terms terms);
  static DistributionalBaseDensity single(const MultiIndex& i, BaseDensity tau);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  DistributionalBaseDensity operator+(const DistributionalBaseDensity& o) const;
  DistributionalBaseDensity scaled(const ExactComplex& c) const;
  void add_term(const MultiIndex& i, const BaseDensity& tau);

  bool operator==(const DistributionalBaseDensity& o) const { return terms_ == o.terms_; }

 private:
  Terms terms_;
};

/// Compactly supported formal density  sum_L D_L (y*)^L  on an open set U,
/// pairing with formal functions by  <u, D (y*)^L> = L! <D, u_L>.
class FormalDensity {
 public:
  using Coeffs = std::map<MultiIndex, DistributionalBaseDensity>;

  FormalDensity(BasePtr base, Region domain, std::size_t formal_degree, Coeffs coeffs = {});
  static FormalDensity zero(BasePtr base, Region domain, std::size_t k);
  /// tau d_x^I (y*)^L.
  static FormalDensity monomial(BasePtr base, Region domain, std::size_t k, const MultiIndex& i, const MultiIndex& l,
                                BaseDensity tau);

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  const Coeffs& coeffs() const { return coeffs_; }
  /// Largest |L| with a nonzero coefficient (0 for the zero density).
  unsigned star_degree() const;
  bool is_zero() const { return coeffs_.empty(); }

  FormalDensity operator+(const FormalDensity& o) const;
  FormalDensity operator-(const FormalDensity& o) const;
  FormalDensity scaled(const ExactComplex& c) const;

  /// Same data viewed on another open set (no checks; see ext()).
  FormalDensity with_domain(Region domain) const;

  /// Exact data equality (decisive on the discrete base).
  bool operator==(const FormalDensity& o) const;

 private:
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  Coeffs coeffs_;
};

/// <eta, u> = sum_L L! sum_I int_U tau_{I,L} d_x^I u_L.
Number pair(const FormalDensity& eta, const FormalFunction& u, const QuadratureOptions& options = {});
/// The per-L contributions to pair(), keyed by L.
std::map<MultiIndex, Number> pair_breakdown(const FormalDensity& eta, const FormalFunction& u,
                                            const QuadratureOptions& options = {});

/// eta o f, characterized by <eta o f, u> = <eta, f u>.
FormalDensity module_action(const FormalDensity& eta, const FormalFunction& f);

/// Extension from V = domain(eta) to U (transpose of restriction).
FormalDensity ext(const FormalDensity& eta, const Region& u);

/// The unique density on U whose extension to M equals eta o f; requires
/// supp f inside U.
FormalDensity cutoff_restrict(const FormalDensity& eta, const SupportedFormalFunction& f, const Region& u);

/// Union of coefficient supports (compact witness).
Region support(const FormalDensity& eta);

namespace detail {

/// One renormalized term of (tau d^I (y*)^L) o f: coefficient of d^{I'} (y*)^B.
struct LeibnizTerm {
  MultiIndex i;
  MultiIndex b;
  BaseDensity tau;
};

/// Expands  L! <tau, d^I (f u)_L>  into  sum B! <tau', d^{I'} u_B>  terms.
std::vector<LeibnizTerm> leibniz_expand(const BaseDensity& tau, const MultiIndex& i, const MultiIndex& l,
                                        const FormalFunction& f);

}  // namespace detail

}  // namespace formalcalc
