#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "formalcalc/interval_set.hpp"
#include "formalcalc/number.hpp"

namespace formalcalc {

/// Closed real interval used for enclosures; ends may be infinite.
struct RealInterval {
  Real lo;
  Real hi;
};

/// Smooth function of one real variable x, stored as an immutable
/// expression DAG with exact complex-rational constants.
///
/// The only transcendental primitive is the smoothstep kernel
///   s_p(t) = exp(-1/t) * t^-p  for t > 0,   0 for t <= 0,
/// written `(s e)` for p = 0 and `(sk p e)` otherwise. The family is closed
/// under differentiation: s_p' = s_{p+2} - p s_{p+1}.
///
/// A `(supp ...)` node declares that its child vanishes outside a closed set;
/// evaluation outside the set returns an exact zero without touching the child.
class SmoothExpr {
 public:
  enum class Kind { kConst, kVar, kAdd, kMul, kDiv, kPow, kKernel, kSupport };

  /// The zero constant.
  SmoothExpr();

  static SmoothExpr constant(ExactComplex c);
  static SmoothExpr x();
  static SmoothExpr pow(const SmoothExpr& base, unsigned n);
  /// s_p(arg).
  static SmoothExpr kernel(const SmoothExpr& arg, unsigned p = 0);
  /// Declares `e` to vanish outside the closed set `support`.
  static SmoothExpr with_support(const SmoothExpr& e, const IntervalSet& support);

  friend SmoothExpr operator+(const SmoothExpr& a, const SmoothExpr& b);
  friend SmoothExpr operator-(const SmoothExpr& a, const SmoothExpr& b);
  friend SmoothExpr operator*(const SmoothExpr& a, const SmoothExpr& b);
  friend SmoothExpr operator/(const SmoothExpr& a, const SmoothExpr& b);
  friend SmoothExpr operator-(const SmoothExpr& a);

  Kind kind() const;
  bool is_zero() const;
  bool is_constant() const { return kind() == Kind::kConst; }
  /// Precondition: is_constant().
  const ExactComplex& constant_value() const;
  /// True when no constant has an imaginary part.
  bool is_real() const;
  /// Number of distinct nodes in the DAG.
  std::size_t node_count() const;

  SmoothExpr derivative() const;
  SmoothExpr derivative(unsigned order) const;

  /// Exact where the path avoids kernels at positive arguments; otherwise a
  /// long double approximation.
  Number evaluate(const Rational& at) const;
  ComplexReal evaluate(Real at) const;
  /// Enclosure of the real part over [x.lo, x.hi]; may be (-inf, inf).
  RealInterval enclose(RealInterval x) const;

  /// Closed set outside of which the expression is identically zero, when
  /// one can be derived from the structure.
  std::optional<IntervalSet> support_bound() const;

  /// Coefficients c_0..c_d when the expression is a polynomial in x,
  /// possibly restricted by support declarations (returned separately).
  struct PolynomialView {
    std::vector<ExactComplex> coeffs;
    std::optional<IntervalSet> support;
  };
  std::optional<PolynomialView> polynomial() const;

  /// Denominators of every quotient node.
  std::vector<SmoothExpr> denominators() const;

  std::string to_sexpr() const;
  static SmoothExpr parse(const std::string& text);

  /// Structural identity of the underlying node (cheap).
  bool same_node(const SmoothExpr& other) const { return node_ == other.node_; }

  struct Node;

 private:
  explicit SmoothExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend class CompiledExpr;
};

/// Flattened DAG for repeated floating evaluation (quadrature, sampling).
class CompiledExpr {
 public:
  explicit CompiledExpr(const SmoothExpr& e);
  ComplexReal operator()(Real at) const;

 private:
  struct Instr {
    SmoothExpr::Kind kind;
    ComplexReal value;
    unsigned n = 0;
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<std::pair<Real, Real>> support;
  };
  ComplexReal eval(std::size_t idx, Real at, std::vector<ComplexReal>& memo, std::vector<char>& done) const;
  std::vector<Instr> instrs_;
  std::size_t root_ = 0;
};

/// Smooth step rising from 0 (x <= lo) to 1 (x >= hi); lo < hi.
SmoothExpr rising_edge(const Rational& lo, const Rational& hi);
/// Smooth step falling from 1 (x <= lo) to 0 (x >= hi); lo < hi.
SmoothExpr falling_edge(const Rational& lo, const Rational& hi);

/// 1 on [b, c], 0 outside (a, d), values in [0, 1]; support bound [a, d].
/// Requires a < b <= c < d.
SmoothExpr bump(const Rational& a, const Rational& b, const Rational& c, const Rational& d);

/// Interval-arithmetic proof that the real expression is > 0 on `region`.
/// Open finite ends of the region are approached up to a relative margin of 2^-30.
bool certify_positive(const SmoothExpr& e, const IntervalSet& region);

/// Throws PreconditionError unless every quotient's denominator is certified
/// positive on `region`.
void certify_quotients(const SmoothExpr& e, const IntervalSet& region);

}  // namespace formalcalc
