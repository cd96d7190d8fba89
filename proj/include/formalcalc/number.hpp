#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <variant>

#include <gmpxx.h>

namespace formalcalc {

using Rational = mpq_class;
/// Floating type used whenever a transcendental value or quadrature intervenes.
/// On x86-64 this is the 80-bit extended format (64-bit mantissa, ~19 digits).
using Real = long double;
using ComplexReal = std::complex<Real>;

/// Exact complex rational re + i*im.
struct ExactComplex {
  Rational re = 0;
  Rational im = 0;

  ExactComplex() = default;
  ExactComplex(Rational r) : re(std::move(r)) {}  // NOLINT(implicit)
  ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(int v) : re(v) {}  // NOLINT(implicit)

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  ComplexReal to_complex() const { return {static_cast<Real>(re.get_d()), static_cast<Real>(im.get_d())}; }
  ExactComplex conj() const { return {re, -im}; }
  /// |z|^2, exact.
  Rational norm() const { return re * re + im * im; }

  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);
  ExactComplex& operator/=(const ExactComplex& o);

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }

  /// "3", "-1/2", "1/2+3i", "-2i".
  std::string to_string() const;
};

/// Parses "p/q", "a+bi", "a-bi", "bi", decimal literals like "0.25" (exactly).
ExactComplex parse_exact(const std::string& text);
Rational parse_rational(const std::string& text);

std::ostream& operator<<(std::ostream& os, const ExactComplex& z);

/// A complex scalar that stays exact until a transcendental or quadrature
/// step forces a floating approximation. Exact zero absorbs products.
class Number {
 public:
  Number() : value_(ExactComplex{}) {}
  Number(ExactComplex z) : value_(std::move(z)) {}  // NOLINT(implicit)
  Number(Rational r) : value_(ExactComplex(std::move(r))) {}  // NOLINT(implicit)
  Number(int v) : value_(ExactComplex(v)) {}  // NOLINT(implicit)
  Number(ComplexReal z) : value_(z) {}  // NOLINT(implicit)
  static Number approx(Real v) { return Number(ComplexReal(v, 0)); }

  bool is_exact() const { return std::holds_alternative<ExactComplex>(value_); }
  /// Precondition: is_exact().
  const ExactComplex& exact() const;
  ComplexReal to_complex() const;
  /// Exact zero, or a floating value that compares equal to 0.
  bool is_zero() const;
  Real abs() const { return std::abs(to_complex()); }

  Number& operator+=(const Number& o);
  Number& operator-=(const Number& o);
  Number& operator*=(const Number& o);
  Number& operator/=(const Number& o);

  friend Number operator+(Number a, const Number& b) { return a += b; }
  friend Number operator-(Number a, const Number& b) { return a -= b; }
  friend Number operator*(Number a, const Number& b) { return a *= b; }
  friend Number operator/(Number a, const Number& b) { return a /= b; }
  friend Number operator-(const Number& a);

  /// Exact equality when both are exact; bitwise value equality otherwise.
  friend bool operator==(const Number& a, const Number& b);

  std::string to_string() const;

 private:
  std::variant<ExactComplex, ComplexReal> value_;
};

std::ostream& operator<<(std::ostream& os, const Number& n);

/// |a - b| as a floating value (0 when both exact and equal).
Real distance(const Number& a, const Number& b);

}  // namespace formalcalc
