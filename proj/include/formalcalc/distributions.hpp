#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "formalcalc/formal_density.hpp"

namespace formalcalc {

/// Element of the coordinate space E = C^m.
using EVector = std::vector<Number>;

/// Distribution on an open subset of N with a finite representation.
/// Discrete base: point weights, acting by weighted sums. Line: a smooth
/// density term g (acting by phi -> int g phi dx) plus point terms
/// (a, i, w) acting by phi -> w * phi^(i)(a).
class BaseDistribution {
 public:
  using PointKey = std::pair<Rational, unsigned>;
  using PointTerms = std::map<PointKey, Number>;

  BaseDistribution() = default;
  static BaseDistribution zero(const BaseSpace& base);
  static BaseDistribution discrete(PointValues weights);
  static BaseDistribution smooth(SmoothExpr g);
  static BaseDistribution point(const Rational& at, unsigned order, Number weight = Number(1));

  bool is_discrete() const { return discrete_; }
  const PointValues& weights() const { return weights_; }
  const SmoothExpr& smooth_part() const { return smooth_; }
  const PointTerms& point_terms() const { return points_; }
  bool is_zero() const;

  BaseDistribution operator+(const BaseDistribution& o) const;
  BaseDistribution scaled(const Number& c) const;
  /// The product f T.
  BaseDistribution times(const BaseFunction& f) const;
  /// Drops point terms outside V (restriction to an open subset).
  BaseDistribution restricted(const Region& v) const;
  /// Extension-by-zero view: smooth part declared to vanish outside `support`,
  /// point terms outside it dropped.
  BaseDistribution with_support(const Region& support) const;
  /// Closed witness; absent when the smooth part carries no support bound.
  std::optional<Region> support() const;

  /// <T, phi> for a smooth function phi with compact support on `domain`.
  Number apply(const BaseFunction& phi, const Region& domain, const QuadratureOptions& options = {}) const;
  /// <T, sum_I tau_I d^I>: derivative stacks transposed onto T, i.e.
  /// sum_I <d^I T, tau_I> with distributional derivatives.
  Number apply(const DistributionalBaseDensity& d, const Region& domain, const QuadratureOptions& options = {}) const;

 private:
  bool discrete_ = false;
  PointValues weights_;
  SmoothExpr smooth_;
  PointTerms points_;
};

/// E-valued formal distribution sum_L T_L (y*)^L on U, acting on compactly
/// supported formal functions by <eta, u> = sum_L L! <T_L, u_L>.
class FormalDistribution {
 public:
  using Coeffs = std::map<MultiIndex, std::vector<BaseDistribution>>;

  FormalDistribution(BasePtr base, Region domain, std::size_t formal_degree, std::size_t e_dim, Coeffs coeffs = {});

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  std::size_t e_dim() const { return m_; }
  const Coeffs& coeffs() const { return coeffs_; }
  unsigned star_degree() const;

  FormalDistribution operator+(const FormalDistribution& o) const;
  FormalDistribution scaled(const Number& c) const;
  /// Component slice e as a scalar (E = C) distribution.
  FormalDistribution component(std::size_t e) const;
  /// Restriction to an open V inside the domain.
  FormalDistribution restrict(const Region& v) const;
  /// Union of coefficient supports, when every smooth part is support-bounded.
  std::optional<Region> support() const;

 private:
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  std::size_t m_;
  Coeffs coeffs_;
};

/// A formal distribution with a compact support witness.
class CompactFormalDistribution {
 public:
  CompactFormalDistribution(FormalDistribution inner, Region support);
  /// Witness computed from the coefficients; throws SupportError when it is not compact.
  static CompactFormalDistribution from(FormalDistribution inner);

  const FormalDistribution& distribution() const { return inner_; }
  const Region& support() const { return support_; }

 private:
  FormalDistribution inner_;
  Region support_;
};

/// E-valued generalized formal function sum_J T_J y^J (truncated at T),
/// acting on formal densities by <u, eta> = sum_L L! <T_L, eta_L>.
class GeneralizedFunction {
 public:
  using Coeffs = std::map<MultiIndex, std::vector<BaseDistribution>>;

  GeneralizedFunction(BasePtr base, Region domain, std::size_t formal_degree, unsigned trunc, std::size_t e_dim,
                      Coeffs coeffs = {});
  /// A formal function viewed as a (C-valued) generalized function.
  static GeneralizedFunction embed(const FormalFunction& u);
  /// E-valued embedding of m formal functions.
  static GeneralizedFunction embed(const std::vector<FormalFunction>& components);

  const BasePtr& base() const { return base_; }
  const Region& domain() const { return domain_; }
  std::size_t formal_degree() const { return k_; }
  unsigned trunc() const { return trunc_; }
  std::size_t e_dim() const { return m_; }
  const Coeffs& coeffs() const { return coeffs_; }

  GeneralizedFunction operator+(const GeneralizedFunction& o) const;
  GeneralizedFunction scaled(const Number& c) const;
  GeneralizedFunction component(std::size_t e) const;
  GeneralizedFunction restrict(const Region& v) const;
  /// The product f u (truncated Cauchy product in y).
  GeneralizedFunction times(const FormalFunction& f) const;
  /// Extension by zero to M of a section vanishing outside the closed set
  /// `support`, whose trace on M must lie inside the current domain.
  GeneralizedFunction extend_by_zero(const Region& support, const Region& m) const;

 private:
  BasePtr base_;
  Region domain_;
  std::size_t k_;
  unsigned trunc_;
  std::size_t m_;
  Coeffs coeffs_;
};

/// E-valued point distribution sum c_{I,J} Ev_a o d_x^I d_y^J.
class PointDistribution {
 public:
  using Terms = std::map<std::pair<MultiIndex, MultiIndex>, std::vector<ExactComplex>>;

  PointDistribution(BasePtr base, Point at, std::size_t formal_degree, std::size_t e_dim, Terms terms = {});
  /// Scalar Ev_a o d_x^I d_y^J.
  static PointDistribution basis(BasePtr base, Point at, std::size_t k, const MultiIndex& i, const MultiIndex& j);

  const BasePtr& base() const { return base_; }
  const Point& at() const { return at_; }
  std::size_t formal_degree() const { return k_; }
  std::size_t e_dim() const { return m_; }
  const Terms& terms() const { return terms_; }
  unsigned y_order() const;

 private:
  BasePtr base_;
  Point at_;
  std::size_t k_;
  std::size_t m_;
  Terms terms_;
};

/// <eta, u> for compactly supported u.
EVector apply_dist(const FormalDistribution& eta, const SupportedFormalFunction& u,
                   const QuadratureOptions& options = {});

/// <u, eta> for a generalized function u and a compactly supported formal density.
EVector apply_gen(const GeneralizedFunction& u, const FormalDensity& eta, const QuadratureOptions& options = {});

/// eta o f, characterized by <eta o f, u> = <eta, f u>.
FormalDistribution module_action_dist(const FormalDistribution& eta, const FormalFunction& f);

/// Extension by zero of a compactly supported formal distribution from its domain to M.
CompactFormalDistribution ext(const CompactFormalDistribution& eta, const Region& m);

/// Extension by zero to M of a distribution vanishing outside the closed set
/// `support`, whose trace on M must lie inside the current domain.
FormalDistribution extend_by_zero(const FormalDistribution& eta, const Region& support, const Region& m);

/// (eta o f)|_U for f supported inside U (compactly supported result).
CompactFormalDistribution cutoff_restrict(const CompactFormalDistribution& eta, const SupportedFormalFunction& f,
                                          const Region& u);

/// The extension eta' of a compactly supported eta to all sections on M,
/// <eta', u> = <eta, f u>, for a cutoff f equal to 1 near supp eta.
class ExtendedDistribution {
 public:
  EVector operator()(const FormalFunction& u, const QuadratureOptions& options = {}) const;
  const CompactFormalDistribution& distribution() const { return eta_; }
  const SupportedFormalFunction& cutoff() const { return cutoff_; }

 private:
  ExtendedDistribution(CompactFormalDistribution eta, SupportedFormalFunction f)
      : eta_(std::move(eta)), cutoff_(std::move(f)) {}
  CompactFormalDistribution eta_;
  SupportedFormalFunction cutoff_;
  friend ExtendedDistribution cutoff_extend(const CompactFormalDistribution&, const SupportedFormalFunction&,
                                            const Region&);
};

/// Builds eta'. `plateau` is an open set on which f = 1 is claimed; it must
/// contain supp eta. The claim is verified exactly on a discrete base (f_0 = 1
/// and all higher coefficients 0 at its points); on the line, higher
/// coefficients must vanish structurally and f_0 is checked to equal 1 within
/// 1e-12 at 101 samples of each plateau component.
ExtendedDistribution cutoff_extend(const CompactFormalDistribution& eta, const SupportedFormalFunction& f,
                                   const Region& plateau);

/// sum c_{I,J} jet(u, a, I, J).
EVector point_apply(const PointDistribution& eta, const FormalFunction& u);

/// The same functional as a compactly supported formal distribution with support {a}.
CompactFormalDistribution to_compact(const PointDistribution& eta);

/// True iff every jet of total order |I| + |J| < r vanishes at a.
bool jet_kernel_check(const FormalFunction& u, const Point& a, unsigned r);

/// Number of basis functionals Ev_a o d_x^I d_y^J with |I| + |J| <= r, counted by enumeration.
std::size_t dist_space_dimension(std::size_t n, std::size_t k, unsigned r);

}  // namespace formalcalc
