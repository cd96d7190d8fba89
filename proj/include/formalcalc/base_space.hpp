#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "formalcalc/interval_set.hpp"

namespace formalcalc {

/// The reduced manifold N: either a finite set of labeled points or the real line.
class BaseSpace {
 public:
  enum class Kind { kDiscrete, kSmoothLine };

  static std::shared_ptr<const BaseSpace> discrete(std::vector<std::string> labels);
  static std::shared_ptr<const BaseSpace> smooth_line();

  Kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == Kind::kDiscrete; }
  /// Number of x-variables: 0 for a discrete base, 1 for the line.
  std::size_t dimension() const { return is_discrete() ? 0 : 1; }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t point_count() const { return labels_.size(); }
  std::size_t index_of(const std::string& label) const;

 private:
  BaseSpace(Kind kind, std::vector<std::string> labels) : kind_(kind), labels_(std::move(labels)) {}
  Kind kind_;
  std::vector<std::string> labels_;
};

using BasePtr = std::shared_ptr<const BaseSpace>;

/// A point of N: a label index on a discrete base, a rational coordinate on the line.
class Point {
 public:
  static Point discrete(std::size_t index) { return Point(index); }
  static Point line(Rational x) { return Point(std::move(x)); }

  bool is_discrete() const { return std::holds_alternative<std::size_t>(value_); }
  std::size_t index() const;
  const Rational& coordinate() const;

  std::string to_string(const BaseSpace& base) const;
  bool operator==(const Point& other) const = default;

 private:
  explicit Point(std::size_t i) : value_(i) {}
  explicit Point(Rational x) : value_(std::move(x)) {}
  std::variant<std::size_t, Rational> value_;
};

/// Subset of N: a set of point indices (discrete) or a finite interval union
/// (line). Used for open sets and for support witnesses.
class Region {
 public:
  Region() = default;
  static Region points(std::set<std::size_t> indices) { return Region(std::move(indices)); }
  static Region intervals(IntervalSet set) { return Region(std::move(set)); }
  /// All of N.
  static Region whole(const BaseSpace& base);
  /// The empty subset of the same flavor as `base`.
  static Region nothing(const BaseSpace& base);

  bool is_discrete() const { return std::holds_alternative<std::set<std::size_t>>(value_); }
  const std::set<std::size_t>& point_set() const;
  const IntervalSet& interval_set() const;

  bool empty() const;
  bool contains(const Point& p) const;
  Region intersect(const Region& other) const;
  Region unite(const Region& other) const;
  Region minus(const Region& other) const;
  bool subset_of(const Region& other) const;
  /// Discrete: always; line: closed and bounded.
  bool is_compact() const;
  /// Compact and contained in `open`.
  bool compactly_inside(const Region& open) const;

  std::string to_string(const BaseSpace& base) const;
  bool operator==(const Region& other) const = default;

 private:
  explicit Region(std::set<std::size_t> s) : value_(std::move(s)) {}
  explicit Region(IntervalSet s) : value_(std::move(s)) {}
  void require_same_flavor(const Region& other) const;
  std::variant<std::set<std::size_t>, IntervalSet> value_;
};

using OpenSet = Region;

/// Throws MismatchError unless both pointers designate the same base space.
void require_same_base(const BasePtr& a, const BasePtr& b);

}  // namespace formalcalc
