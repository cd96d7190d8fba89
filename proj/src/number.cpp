#include "formalcalc/number.hpp"

#include <cctype>
#include <iomanip>
#include <limits>
#include <sstream>

#include "formalcalc/errors.hpp"

namespace formalcalc {

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  if (is_real() && o.is_real()) {
    re *= o.re;
    return *this;
  }
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
  if (o.is_zero()) throw PreconditionError("exact division by zero");
  if (o.is_real()) {
    re /= o.re;
    im /= o.re;
    return *this;
  }
  Rational n = o.norm();
  *this *= o.conj();
  re /= n;
  im /= n;
  return *this;
}

std::string ExactComplex::to_string() const {
  if (is_real()) return re.get_str();
  std::string imag = (abs(im) == 1 ? std::string() : Rational(abs(im)).get_str()) + "i";
  if (sgn(re) == 0) return (sgn(im) < 0 ? "-" : "") + imag;
  return re.get_str() + (sgn(im) < 0 ? "-" : "+") + imag;
}

std::ostream& operator<<(std::ostream& os, const ExactComplex& z) { return os << z.to_string(); }

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  if (text.empty()) throw ParseError("empty rational literal");
  auto bad = [&] { return ParseError("malformed rational literal '" + raw + "'"); };
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    // Decimal literal, converted exactly.
    std::string sign;
    std::string body = text;
    if (body[0] == '-' || body[0] == '+') {
      sign = body[0] == '-' ? "-" : "";
      body = body.substr(1);
    }
    dot = body.find('.');
    std::string whole = body.substr(0, dot);
    std::string frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || body.find('.', dot + 1) != std::string::npos) throw bad();
    for (char c : whole + frac) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    }
    mpz_class num(sign + (whole.empty() ? "0" : whole) + frac, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  auto slash = text.find('/');
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool ok = std::isdigit(static_cast<unsigned char>(c)) || (i == slash) ||
              ((c == '-' || c == '+') && (i == 0));
    if (!ok) throw bad();
  }
  if (text == "-" || text == "+") throw bad();
  if (text[0] == '+') text = text.substr(1);
  Rational q;
  if (q.set_str(text, 10) != 0) throw bad();
  if (slash != std::string::npos && sgn(q.get_den()) == 0) throw bad();
  q.canonicalize();
  return q;
}

ExactComplex parse_exact(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  if (text.empty()) throw ParseError("empty complex literal");
  if (text.back() != 'i') return ExactComplex(parse_rational(text));
  std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not the leading one.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if (body[i] == '+' || body[i] == '-') {
      split = i;
      break;
    }
  }
  auto imag_part = [](const std::string& s) -> Rational {
    if (s.empty() || s == "+") return 1;
    if (s == "-") return -1;
    return parse_rational(s);
  };
  if (split == std::string::npos) return ExactComplex(0, imag_part(body));
  return ExactComplex(parse_rational(body.substr(0, split)), imag_part(body.substr(split)));
}

const ExactComplex& Number::exact() const {
  if (!is_exact()) throw PreconditionError("number is not exact: " + to_string());
  return std::get<ExactComplex>(value_);
}

ComplexReal Number::to_complex() const {
  if (const auto* z = std::get_if<ExactComplex>(&value_)) return z->to_complex();
  return std::get<ComplexReal>(value_);
}

bool Number::is_zero() const {
  if (const auto* z = std::get_if<ExactComplex>(&value_)) return z->is_zero();
  return std::get<ComplexReal>(value_) == ComplexReal(0, 0);
}

Number& Number::operator+=(const Number& o) {
  if (is_exact() && o.is_exact()) {
    std::get<ExactComplex>(value_) += o.exact();
  } else if (o.is_exact() && o.exact().is_zero()) {
    // unchanged
  } else if (is_exact() && exact().is_zero()) {
    value_ = o.value_;
  } else {
    value_ = to_complex() + o.to_complex();
  }
  return *this;
}

Number& Number::operator-=(const Number& o) { return *this += -o; }

Number& Number::operator*=(const Number& o) {
  if (is_exact() && o.is_exact()) {
    std::get<ExactComplex>(value_) *= o.exact();
  } else if ((is_exact() && exact().is_zero()) || (o.is_exact() && o.exact().is_zero())) {
    value_ = ExactComplex{};
  } else {
    value_ = to_complex() * o.to_complex();
  }
  return *this;
}

Number& Number::operator/=(const Number& o) {
  if (is_exact() && o.is_exact()) {
    std::get<ExactComplex>(value_) /= o.exact();
  } else if (is_exact() && exact().is_zero()) {
    if (o.is_zero()) throw PreconditionError("division by zero");
  } else {
    if (o.is_zero()) throw PreconditionError("division by zero");
    value_ = to_complex() / o.to_complex();
  }
  return *this;
}

Number operator-(const Number& a) {
  if (a.is_exact()) return Number(-a.exact());
  return Number(-a.to_complex());
}

bool operator==(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
  return a.to_complex() == b.to_complex();
}

std::string Number::to_string() const {
  if (is_exact()) return exact().to_string();
  auto z = to_complex();
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << static_cast<double>(z.real());
  if (z.imag() != 0) {
    os << (z.imag() < 0 ? "-" : "+") << static_cast<double>(std::abs(z.imag())) << "i";
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Number& n) { return os << n.to_string(); }

Real distance(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) {
    ExactComplex d = a.exact() - b.exact();
    if (d.is_zero()) return 0;
    return std::sqrt(static_cast<Real>(d.norm().get_d()));
  }
  return std::abs(a.to_complex() - b.to_complex());
}

}  // namespace formalcalc
