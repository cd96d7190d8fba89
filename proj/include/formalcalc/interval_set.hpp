#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "formalcalc/number.hpp"

namespace formalcalc {

/// Rational number extended by -inf and +inf.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational v) : kind_(Kind::kFinite), value_(std::move(v)) {}  // NOLINT(implicit)
  ExtRational(int v) : kind_(Kind::kFinite), value_(v) {}                  // NOLINT(implicit)
  template <class T, class U>
  ExtRational(const __gmp_expr<T, U>& e) : kind_(Kind::kFinite), value_(e) {}  // NOLINT(implicit)
  static ExtRational neg_inf() { return ExtRational(Kind::kNegInf); }
  static ExtRational pos_inf() { return ExtRational(Kind::kPosInf); }

  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_neg_inf() const { return kind_ == Kind::kNegInf; }
  bool is_pos_inf() const { return kind_ == Kind::kPosInf; }
  /// Precondition: is_finite().
  const Rational& value() const;
  Real to_real() const;
  std::string to_string() const;
  static ExtRational parse(const std::string& text);

  friend bool operator==(const ExtRational& a, const ExtRational& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  enum class Kind { kNegInf, kFinite, kPosInf };
  explicit ExtRational(Kind k) : kind_(k) {}
  Kind kind_ = Kind::kFinite;
  Rational value_ = 0;
};

/// A single nonempty real interval with independently open/closed ends.
/// Infinite ends are always open.
struct Interval {
  ExtRational lo;
  ExtRational hi;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval open(ExtRational lo, ExtRational hi) { return {std::move(lo), std::move(hi), false, false}; }
  static Interval closed(ExtRational lo, ExtRational hi) { return {std::move(lo), std::move(hi), true, true}; }

  bool contains(const Rational& x) const;
  bool contains(Real x) const;
  bool bounded() const { return lo.is_finite() && hi.is_finite(); }
  bool operator==(const Interval&) const = default;
};

/// Finite union of real intervals kept in canonical form: disjoint, sorted,
/// nonempty, with adjacent pieces that touch merged. Open sets of the line are
/// unions of open intervals; supports are unions of closed ones.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> pieces);

  static IntervalSet line() { return IntervalSet({Interval::open(ExtRational::neg_inf(), ExtRational::pos_inf())}); }
  static IntervalSet open(ExtRational lo, ExtRational hi);
  static IntervalSet closed(ExtRational lo, ExtRational hi);
  static IntervalSet point(const Rational& x) { return closed(x, x); }

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  bool bounded() const;
  bool is_open() const;
  bool is_closed() const;

  bool contains(const Rational& x) const;
  bool contains(Real x) const;

  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet complement() const;
  IntervalSet minus(const IntervalSet& other) const { return intersect(other.complement()); }
  bool subset_of(const IntervalSet& other) const;

  IntervalSet closure() const;
  IntervalSet interior() const;

  /// Smallest and largest points of the closure (may be infinite).
  std::optional<std::pair<ExtRational, ExtRational>> hull() const;

  bool operator==(const IntervalSet& other) const = default;

  std::string to_string() const;

 private:
  void canonicalize();
  std::vector<Interval> pieces_;
};

/// True when `compact` is closed and bounded and lies inside the open set `open`.
bool compactly_inside(const IntervalSet& compact, const IntervalSet& open);

}  // namespace formalcalc
