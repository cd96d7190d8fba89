#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace formalcalc {

/// Exponent vector for the x- or y-variables of a chart.
///
/// Values are immutable once built. The total order is graded
/// lexicographic: first by degree, then lexicographically by entries.
/// Indices of different lengths are never comparable; mixing them throws
/// MismatchError.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t length) : entries_(length, 0) {}
  explicit MultiIndex(std::vector<std::uint32_t> entries) : entries_(std::move(entries)) {}
  MultiIndex(std::initializer_list<std::uint32_t> entries) : entries_(entries) {}

  static MultiIndex zero(std::size_t length) { return MultiIndex(length); }
  /// Unit vector e_i of the given length.
  static MultiIndex unit(std::size_t length, std::size_t i);

  std::size_t length() const { return entries_.size(); }
  std::uint32_t operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<std::uint32_t>& entries() const { return entries_; }

  std::uint64_t degree() const;
  mpz_class factorial() const;
  bool is_zero() const { return degree() == 0; }

  /// Componentwise l <= *this.
  bool dominates(const MultiIndex& l) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; throws PreconditionError if a component would go negative.
  MultiIndex operator-(const MultiIndex& other) const;

  /// Comma separated entries, e.g. "2,1"; the empty index is "".
  std::string to_csv() const;
  static MultiIndex from_csv(const std::string& text, std::size_t expected_length);

  bool operator==(const MultiIndex& other) const = default;
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  std::vector<std::uint32_t> entries_;
};

std::uint64_t degree(const MultiIndex& m);
mpz_class factorial(const MultiIndex& m);
/// Componentwise difference m - l; rejects negative components.
MultiIndex sub(const MultiIndex& m, const MultiIndex& l);

/// Product of componentwise binomials binom(m_i, l_i); zero unless l <= m.
mpz_class binomial(const MultiIndex& m, const MultiIndex& l);

/// All indices of the given length with degree <= max_degree, graded-lex order.
std::vector<MultiIndex> enumerate_upto(std::size_t length, std::uint32_t max_degree);

/// All indices l with l <= m componentwise, graded-lex order.
std::vector<MultiIndex> enumerate_below(const MultiIndex& m);

/// binom(n + r, n) as an exact integer.
mpz_class count_upto(std::size_t length, std::uint32_t max_degree);

}  // namespace formalcalc
