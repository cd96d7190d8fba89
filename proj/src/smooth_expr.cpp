#include "formalcalc/smooth_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "formalcalc/errors.hpp"

namespace formalcalc {

using NodePtr = std::shared_ptr<const SmoothExpr::Node>;

struct SmoothExpr::Node {
  Kind kind = Kind::kConst;
  ExactComplex value;   // kConst
  unsigned n = 0;       // kPow exponent, kKernel order p
  NodePtr a;            // first child
  NodePtr b;            // second child (kAdd, kMul, kDiv)
  IntervalSet support;  // kSupport
};

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

NodePtr make_const(ExactComplex c) {
  auto node = std::make_shared<SmoothExpr::Node>();
  node->kind = SmoothExpr::Kind::kConst;
  node->value = std::move(c);
  return node;
}

const NodePtr& zero_node() {
  static const NodePtr zero = make_const(ExactComplex{});
  return zero;
}

bool is_const(const NodePtr& n) { return n->kind == SmoothExpr::Kind::kConst; }
bool is_zero_node(const NodePtr& n) { return is_const(n) && n->value.is_zero(); }
bool is_one_node(const NodePtr& n) { return is_const(n) && n->value == ExactComplex(1); }

ExactComplex exact_pow(const ExactComplex& base, unsigned n) {
  ExactComplex result(1);
  for (unsigned i = 0; i < n; ++i) result *= base;
  return result;
}

}  // namespace

SmoothExpr::SmoothExpr() : node_(zero_node()) {}

SmoothExpr SmoothExpr::constant(ExactComplex c) {
  if (c.is_zero()) return SmoothExpr();
  return SmoothExpr(make_const(std::move(c)));
}

SmoothExpr SmoothExpr::x() {
  static const NodePtr var = [] {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kVar;
    return NodePtr(node);
  }();
  return SmoothExpr(var);
}

SmoothExpr SmoothExpr::pow(const SmoothExpr& base, unsigned n) {
  if (n == 0) return constant(1);
  if (n == 1) return base;
  if (base.is_constant()) return constant(exact_pow(base.constant_value(), n));
  if (base.kind() == Kind::kPow) return pow(SmoothExpr(base.node_->a), base.node_->n * n);
  auto node = std::make_shared<Node>();
  node->kind = Kind::kPow;
  node->n = n;
  node->a = base.node_;
  return SmoothExpr(node);
}

SmoothExpr SmoothExpr::kernel(const SmoothExpr& arg, unsigned p) {
  if (arg.is_constant()) {
    const auto& c = arg.constant_value();
    if (!c.is_real()) throw PreconditionError("smoothstep kernel of a non-real constant");
    if (sgn(c.re) <= 0) return SmoothExpr();
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::kKernel;
  node->n = p;
  node->a = arg.node_;
  return SmoothExpr(node);
}

SmoothExpr SmoothExpr::with_support(const SmoothExpr& e, const IntervalSet& support) {
  if (!support.is_closed()) throw PreconditionError("support declaration must be a closed set: " + support.to_string());
  if (e.is_zero() || support.empty()) return SmoothExpr();
  if (support == IntervalSet::line()) return e;
  if (e.kind() == Kind::kSupport) {
    return with_support(SmoothExpr(e.node_->a), support.intersect(e.node_->support));
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::kSupport;
  node->a = e.node_;
  node->support = support;
  return SmoothExpr(node);
}

SmoothExpr operator+(const SmoothExpr& a, const SmoothExpr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return SmoothExpr::constant(a.constant_value() + b.constant_value());
  auto node = std::make_shared<SmoothExpr::Node>();
  node->kind = SmoothExpr::Kind::kAdd;
  node->a = a.node_;
  node->b = b.node_;
  return SmoothExpr(node);
}

SmoothExpr operator*(const SmoothExpr& a, const SmoothExpr& b) {
  if (a.is_zero() || b.is_zero()) return SmoothExpr();
  if (is_one_node(a.node_)) return b;
  if (is_one_node(b.node_)) return a;
  if (a.is_constant() && b.is_constant()) return SmoothExpr::constant(a.constant_value() * b.constant_value());
  // Keep constants on the left and fold nested constant factors.
  if (b.is_constant()) return b * a;
  if (a.is_constant() && b.kind() == SmoothExpr::Kind::kMul && is_const(b.node_->a)) {
    return SmoothExpr::constant(a.constant_value() * b.node_->a->value) * SmoothExpr(b.node_->b);
  }
  auto node = std::make_shared<SmoothExpr::Node>();
  node->kind = SmoothExpr::Kind::kMul;
  node->a = a.node_;
  node->b = b.node_;
  return SmoothExpr(node);
}

SmoothExpr operator-(const SmoothExpr& a) { return SmoothExpr::constant(-1) * a; }

SmoothExpr operator-(const SmoothExpr& a, const SmoothExpr& b) { return a + (-b); }

SmoothExpr operator/(const SmoothExpr& a, const SmoothExpr& b) {
  if (b.is_zero()) throw PreconditionError("division by the zero expression");
  if (a.is_zero()) return SmoothExpr();
  if (b.is_constant()) return SmoothExpr::constant(ExactComplex(1) / b.constant_value()) * a;
  auto node = std::make_shared<SmoothExpr::Node>();
  node->kind = SmoothExpr::Kind::kDiv;
  node->a = a.node_;
  node->b = b.node_;
  return SmoothExpr(node);
}

SmoothExpr::Kind SmoothExpr::kind() const { return node_->kind; }
bool SmoothExpr::is_zero() const { return is_zero_node(node_); }

const ExactComplex& SmoothExpr::constant_value() const {
  if (!is_constant()) throw PreconditionError("expression is not constant");
  return node_->value;
}

namespace {

template <typename Visit>
void for_each_node(const NodePtr& root, Visit&& visit) {
  std::unordered_map<const SmoothExpr::Node*, bool> seen;
  std::vector<const SmoothExpr::Node*> stack{root.get()};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    visit(*n);
    if (n->a) stack.push_back(n->a.get());
    if (n->b) stack.push_back(n->b.get());
  }
}

}  // namespace

bool SmoothExpr::is_real() const {
  bool real = true;
  for_each_node(node_, [&](const Node& n) {
    if (n.kind == Kind::kConst && !n.value.is_real()) real = false;
  });
  return real;
}

std::size_t SmoothExpr::node_count() const {
  std::size_t count = 0;
  for_each_node(node_, [&](const Node&) { ++count; });
  return count;
}

SmoothExpr SmoothExpr::derivative() const {
  std::unordered_map<const Node*, SmoothExpr> memo;
  std::function<SmoothExpr(const NodePtr&)> diff = [&](const NodePtr& p) -> SmoothExpr {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    SmoothExpr self(p);
    SmoothExpr result;
    switch (p->kind) {
      case Kind::kConst:
        break;
      case Kind::kVar:
        result = constant(1);
        break;
      case Kind::kAdd:
        result = diff(p->a) + diff(p->b);
        break;
      case Kind::kMul:
        result = diff(p->a) * SmoothExpr(p->b) + SmoothExpr(p->a) * diff(p->b);
        break;
      case Kind::kDiv: {
        SmoothExpr num(p->a);
        SmoothExpr den(p->b);
        result = (diff(p->a) * den - num * diff(p->b)) / pow(den, 2);
        break;
      }
      case Kind::kPow: {
        SmoothExpr base(p->a);
        result = constant(static_cast<int>(p->n)) * pow(base, p->n - 1) * diff(p->a);
        break;
      }
      case Kind::kKernel: {
        SmoothExpr arg(p->a);
        SmoothExpr outer = kernel(arg, p->n + 2);
        if (p->n > 0) outer = outer - constant(static_cast<int>(p->n)) * kernel(arg, p->n + 1);
        result = outer * diff(p->a);
        break;
      }
      case Kind::kSupport:
        result = with_support(diff(p->a), p->support);
        break;
    }
    memo.emplace(p.get(), result);
    return result;
  };
  return diff(node_);
}

SmoothExpr SmoothExpr::derivative(unsigned order) const {
  SmoothExpr e = *this;
  for (unsigned i = 0; i < order; ++i) e = e.derivative();
  return e;
}

namespace {

Real kernel_value(Real t, unsigned p) {
  if (!(t > 0)) return 0;
  if (std::isinf(t)) return p == 0 ? 1 : 0;
  Real v = std::exp(-1 / t);
  if (p > 0) v *= std::pow(t, -static_cast<Real>(p));
  return v;
}

}  // namespace

Number SmoothExpr::evaluate(const Rational& at) const {
  std::unordered_map<const Node*, Number> memo;
  std::function<Number(const NodePtr&)> eval = [&](const NodePtr& p) -> Number {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    Number r;
    switch (p->kind) {
      case Kind::kConst:
        r = Number(p->value);
        break;
      case Kind::kVar:
        r = Number(at);
        break;
      case Kind::kAdd:
        r = eval(p->a) + eval(p->b);
        break;
      case Kind::kMul: {
        r = eval(p->a);
        if (!(r.is_exact() && r.exact().is_zero())) r *= eval(p->b);
        break;
      }
      case Kind::kDiv: {
        Number num = eval(p->a);
        if (num.is_exact() && num.exact().is_zero()) {
          r = num;
        } else {
          r = num / eval(p->b);
        }
        break;
      }
      case Kind::kPow: {
        Number base = eval(p->a);
        if (base.is_exact()) {
          r = Number(exact_pow(base.exact(), p->n));
        } else {
          r = Number(std::pow(base.to_complex(), static_cast<int>(p->n)));
        }
        break;
      }
      case Kind::kKernel: {
        Number arg = eval(p->a);
        if (arg.is_exact()) {
          const auto& t = arg.exact();
          if (!t.is_real()) throw PreconditionError("smoothstep kernel at a non-real argument");
          if (sgn(t.re) <= 0) {
            r = Number(0);
          } else {
            Rational inv = 1 / t.re;
            Real v = std::exp(-static_cast<Real>(inv.get_d()));
            if (p->n > 0) v *= std::pow(static_cast<Real>(t.re.get_d()), -static_cast<Real>(p->n));
            r = Number::approx(v);
          }
        } else {
          auto t = arg.to_complex();
          if (t.real() > 0) {
            r = Number::approx(kernel_value(t.real(), p->n));
          } else {
            r = Number(0);
          }
        }
        break;
      }
      case Kind::kSupport:
        r = p->support.contains(at) ? eval(p->a) : Number(0);
        break;
    }
    memo.emplace(p.get(), r);
    return r;
  };
  return eval(node_);
}

ComplexReal SmoothExpr::evaluate(Real at) const { return CompiledExpr(*this)(at); }

namespace {

Real down(Real v) { return std::isfinite(v) ? std::nextafter(v - std::abs(v) * 4e-18L, -kInf) : v; }
Real up(Real v) { return std::isfinite(v) ? std::nextafter(v + std::abs(v) * 4e-18L, kInf) : v; }

RealInterval whole() { return {-kInf, kInf}; }

RealInterval sanitize(RealInterval r) {
  if (std::isnan(r.lo) || std::isnan(r.hi)) return whole();
  return {down(r.lo), up(r.hi)};
}

Real mul_ext(Real a, Real b) {
  if (a == 0 || b == 0) return 0;
  return a * b;
}

RealInterval imul(RealInterval a, RealInterval b) {
  Real p[] = {mul_ext(a.lo, b.lo), mul_ext(a.lo, b.hi), mul_ext(a.hi, b.lo), mul_ext(a.hi, b.hi)};
  return sanitize({*std::min_element(p, p + 4), *std::max_element(p, p + 4)});
}

RealInterval ipow(RealInterval a, unsigned n) {
  auto pw = [n](Real v) { return std::pow(v, static_cast<Real>(n)); };
  if (n % 2 == 1) return sanitize({pw(a.lo), pw(a.hi)});
  if (a.lo >= 0) return sanitize({pw(a.lo), pw(a.hi)});
  if (a.hi <= 0) return sanitize({pw(a.hi), pw(a.lo)});
  return sanitize({0, std::max(pw(a.lo), pw(a.hi))});
}

RealInterval ikernel(RealInterval t, unsigned p) {
  if (t.hi <= 0) return {0, 0};
  Real lo_t = std::max<Real>(t.lo, 0);
  Real f_lo = kernel_value(lo_t, p);
  Real f_hi = kernel_value(t.hi, p);
  if (p == 0) return {std::max<Real>(0, down(f_lo) * (1 - 1e-15L)), up(f_hi) * (1 + 1e-15L)};
  Real peak = 1 / static_cast<Real>(p);
  Real hi = std::max(f_lo, f_hi);
  if (lo_t <= peak && peak <= t.hi) hi = kernel_value(peak, p);
  return {std::max<Real>(0, std::min(f_lo, f_hi) * (1 - 1e-15L)), up(hi) * (1 + 1e-15L)};
}

bool meets(const IntervalSet& s, RealInterval x) {
  for (const auto& iv : s.pieces()) {
    if (iv.lo.to_real() <= x.hi && x.lo <= iv.hi.to_real()) return true;
  }
  return false;
}

bool inside(const IntervalSet& s, RealInterval x) {
  for (const auto& iv : s.pieces()) {
    if (iv.lo.to_real() <= x.lo && x.hi <= iv.hi.to_real()) return true;
  }
  return false;
}

}  // namespace

RealInterval SmoothExpr::enclose(RealInterval x) const {
  std::unordered_map<const Node*, RealInterval> memo;
  std::function<RealInterval(const NodePtr&)> enc = [&](const NodePtr& p) -> RealInterval {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    RealInterval r = whole();
    switch (p->kind) {
      case Kind::kConst:
        if (p->value.is_real()) {
          Real v = static_cast<Real>(p->value.re.get_d());
          r = {down(v), up(v)};
        }
        break;
      case Kind::kVar:
        r = x;
        break;
      case Kind::kAdd: {
        auto a = enc(p->a);
        auto b = enc(p->b);
        r = sanitize({a.lo + b.lo, a.hi + b.hi});
        break;
      }
      case Kind::kMul:
        r = imul(enc(p->a), enc(p->b));
        break;
      case Kind::kDiv: {
        auto b = enc(p->b);
        if (b.lo > 0 || b.hi < 0) r = imul(enc(p->a), sanitize({1 / b.hi, 1 / b.lo}));
        break;
      }
      case Kind::kPow:
        r = ipow(enc(p->a), p->n);
        break;
      case Kind::kKernel:
        r = ikernel(enc(p->a), p->n);
        break;
      case Kind::kSupport:
        if (!meets(p->support, x)) {
          r = {0, 0};
        } else {
          auto c = enc(p->a);
          r = inside(p->support, x) ? c : RealInterval{std::min<Real>(c.lo, 0), std::max<Real>(c.hi, 0)};
        }
        break;
    }
    memo.emplace(p.get(), r);
    return r;
  };
  return enc(node_);
}

std::optional<SmoothExpr::PolynomialView> SmoothExpr::polynomial() const {
  using Poly = std::vector<ExactComplex>;
  auto trim = [](Poly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
  };
  auto mul = [&](const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return Poly{};
    Poly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return trim(out);
  };
  auto meet = [](const std::optional<IntervalSet>& a, const std::optional<IntervalSet>& b) -> std::optional<IntervalSet> {
    if (!a) return b;
    if (!b) return a;
    return a->intersect(*b);
  };
  std::function<std::optional<PolynomialView>(const NodePtr&)> view =
      [&](const NodePtr& p) -> std::optional<PolynomialView> {
    switch (p->kind) {
      case Kind::kConst:
        return PolynomialView{trim({p->value}), std::nullopt};
      case Kind::kVar:
        return PolynomialView{{ExactComplex(0), ExactComplex(1)}, std::nullopt};
      case Kind::kAdd: {
        auto a = view(p->a);
        auto b = view(p->b);
        if (!a || !b || a->support != b->support) return std::nullopt;
        Poly out(std::max(a->coeffs.size(), b->coeffs.size()));
        for (std::size_t i = 0; i < a->coeffs.size(); ++i) out[i] += a->coeffs[i];
        for (std::size_t i = 0; i < b->coeffs.size(); ++i) out[i] += b->coeffs[i];
        return PolynomialView{trim(out), a->support};
      }
      case Kind::kMul: {
        auto a = view(p->a);
        auto b = view(p->b);
        if (!a || !b) return std::nullopt;
        return PolynomialView{mul(a->coeffs, b->coeffs), meet(a->support, b->support)};
      }
      case Kind::kPow: {
        auto a = view(p->a);
        if (!a) return std::nullopt;
        Poly out{ExactComplex(1)};
        for (unsigned i = 0; i < p->n; ++i) out = mul(out, a->coeffs);
        return PolynomialView{out, a->support};
      }
      case Kind::kSupport: {
        auto a = view(p->a);
        if (!a) return std::nullopt;
        return PolynomialView{a->coeffs, meet(a->support, p->support)};
      }
      case Kind::kDiv:
      case Kind::kKernel:
        return std::nullopt;
    }
    return std::nullopt;
  };
  return view(node_);
}

std::optional<IntervalSet> SmoothExpr::support_bound() const {
  std::unordered_map<const Node*, std::optional<IntervalSet>> memo;
  std::function<std::optional<IntervalSet>(const NodePtr&)> bound =
      [&](const NodePtr& p) -> std::optional<IntervalSet> {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    std::optional<IntervalSet> r;
    switch (p->kind) {
      case Kind::kConst:
        if (p->value.is_zero()) r = IntervalSet();
        break;
      case Kind::kVar:
        break;
      case Kind::kAdd: {
        auto a = bound(p->a);
        auto b = bound(p->b);
        if (a && b) r = a->unite(*b);
        break;
      }
      case Kind::kMul: {
        auto a = bound(p->a);
        auto b = bound(p->b);
        if (a && b) {
          r = a->intersect(*b);
        } else {
          r = a ? a : b;
        }
        break;
      }
      case Kind::kDiv:
        r = bound(p->a);
        break;
      case Kind::kPow:
        if (p->n > 0) r = bound(p->a);
        break;
      case Kind::kKernel: {
        // s(g) vanishes where g <= 0; exact for affine real g.
        auto g = SmoothExpr(p->a).polynomial();
        if (g && !g->support && g->coeffs.size() <= 2) {
          ExactComplex c0 = g->coeffs.empty() ? ExactComplex(0) : g->coeffs[0];
          ExactComplex c1 = g->coeffs.size() > 1 ? g->coeffs[1] : ExactComplex(0);
          if (c0.is_real() && c1.is_real()) {
            if (sgn(c1.re) > 0) {
              r = IntervalSet::closed(Rational(-c0.re / c1.re), ExtRational::pos_inf());
            } else if (sgn(c1.re) < 0) {
              r = IntervalSet::closed(ExtRational::neg_inf(), Rational(-c0.re / c1.re));
            } else if (sgn(c0.re) <= 0) {
              r = IntervalSet();
            }
          }
        }
        break;
      }
      case Kind::kSupport: {
        auto a = bound(p->a);
        r = a ? a->intersect(p->support) : p->support;
        break;
      }
    }
    memo.emplace(p.get(), r);
    return r;
  };
  return bound(node_);
}

std::vector<SmoothExpr> SmoothExpr::denominators() const {
  std::vector<SmoothExpr> out;
  for_each_node(node_, [&](const Node& n) {
    if (n.kind == Kind::kDiv) out.emplace_back(SmoothExpr(n.b));
  });
  return out;
}

std::string SmoothExpr::to_sexpr() const {
  std::ostringstream os;
  std::function<void(const NodePtr&)> emit = [&](const NodePtr& p) {
    switch (p->kind) {
      case Kind::kConst:
        os << p->value.to_string();
        break;
      case Kind::kVar:
        os << 'x';
        break;
      case Kind::kAdd:
        os << "(+ ";
        emit(p->a);
        os << ' ';
        emit(p->b);
        os << ')';
        break;
      case Kind::kMul:
        os << "(* ";
        emit(p->a);
        os << ' ';
        emit(p->b);
        os << ')';
        break;
      case Kind::kDiv:
        os << "(/ ";
        emit(p->a);
        os << ' ';
        emit(p->b);
        os << ')';
        break;
      case Kind::kPow:
        os << "(pow ";
        emit(p->a);
        os << ' ' << p->n << ')';
        break;
      case Kind::kKernel:
        if (p->n == 0) {
          os << "(s ";
        } else {
          os << "(sk " << p->n << ' ';
        }
        emit(p->a);
        os << ')';
        break;
      case Kind::kSupport:
        os << "(supp";
        for (const auto& iv : p->support.pieces()) os << " (" << iv.lo.to_string() << ' ' << iv.hi.to_string() << ')';
        os << ' ';
        emit(p->a);
        os << ')';
        break;
    }
  };
  emit(node_);
  return os.str();
}

namespace {

struct SexprParser {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  explicit SexprParser(const std::string& text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    };
    for (char c : text) {
      if (c == '(' || c == ')') {
        flush();
        tokens.emplace_back(1, c);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
  }

  [[noreturn]] void fail(const std::string& why) const { throw ParseError("S-expression: " + why); }

  const std::string& next() {
    if (pos >= tokens.size()) fail("unexpected end of input");
    return tokens[pos++];
  }

  void expect(const std::string& t) {
    if (next() != t) fail("expected '" + t + "'");
  }

  unsigned natural() {
    const auto& t = next();
    try {
      std::size_t used = 0;
      long v = std::stol(t, &used);
      if (used != t.size() || v < 0) fail("expected a nonnegative integer, got '" + t + "'");
      return static_cast<unsigned>(v);
    } catch (const std::logic_error&) {
      fail("expected a nonnegative integer, got '" + t + "'");
    }
  }

  SmoothExpr expr() {
    const std::string tok = next();
    if (tok == ")") fail("unexpected ')'");
    if (tok != "(") {
      if (tok == "x") return SmoothExpr::x();
      try {
        return SmoothExpr::constant(parse_exact(tok));
      } catch (const ParseError&) {
        fail("unknown atom '" + tok + "'");
      }
    }
    const std::string head = next();
    auto rest = [&] {
      std::vector<SmoothExpr> args;
      while (pos < tokens.size() && tokens[pos] != ")") args.push_back(expr());
      expect(")");
      return args;
    };
    if (head == "+" || head == "*") {
      auto args = rest();
      if (args.empty()) fail("'" + head + "' needs operands");
      SmoothExpr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = head == "+" ? acc + args[i] : acc * args[i];
      return acc;
    }
    if (head == "-") {
      auto args = rest();
      if (args.size() == 1) return -args[0];
      if (args.size() == 2) return args[0] - args[1];
      fail("'-' takes one or two operands");
    }
    if (head == "/") {
      auto args = rest();
      if (args.size() != 2) fail("'/' takes two operands");
      return args[0] / args[1];
    }
    if (head == "pow") {
      SmoothExpr base = expr();
      unsigned n = natural();
      expect(")");
      return SmoothExpr::pow(base, n);
    }
    if (head == "s") {
      SmoothExpr arg = expr();
      expect(")");
      return SmoothExpr::kernel(arg, 0);
    }
    if (head == "sk") {
      unsigned p = natural();
      SmoothExpr arg = expr();
      expect(")");
      return SmoothExpr::kernel(arg, p);
    }
    if (head == "supp") {
      std::vector<Interval> pieces;
      while (pos + 1 < tokens.size() && tokens[pos] == "(" && tokens[pos + 1] != "(" &&
             pos + 3 < tokens.size() && tokens[pos + 3] == ")" && is_endpoint(tokens[pos + 1])) {
        ++pos;
        ExtRational lo = ExtRational::parse(next());
        ExtRational hi = ExtRational::parse(next());
        expect(")");
        pieces.push_back(Interval::closed(lo, hi));
      }
      SmoothExpr body = expr();
      expect(")");
      return SmoothExpr::with_support(body, IntervalSet(pieces));
    }
    fail("unknown operator '" + head + "'");
  }

  static bool is_endpoint(const std::string& t) {
    if (t == "-inf" || t == "inf" || t == "+inf") return true;
    try {
      parse_rational(t);
      return true;
    } catch (const ParseError&) {
      return false;
    }
  }
};

}  // namespace

SmoothExpr SmoothExpr::parse(const std::string& text) {
  SexprParser parser(text);
  SmoothExpr e = parser.expr();
  if (parser.pos != parser.tokens.size()) parser.fail("trailing input");
  return e;
}

CompiledExpr::CompiledExpr(const SmoothExpr& e) {
  std::unordered_map<const SmoothExpr::Node*, std::size_t> index;
  std::function<std::size_t(const NodePtr&)> compile = [&](const NodePtr& p) -> std::size_t {
    if (auto it = index.find(p.get()); it != index.end()) return it->second;
    Instr ins{p->kind, p->value.to_complex(), p->n, 0, 0, {}};
    if (p->a) ins.a = compile(p->a);
    if (p->b) ins.b = compile(p->b);
    for (const auto& iv : p->support.pieces()) ins.support.emplace_back(iv.lo.to_real(), iv.hi.to_real());
    instrs_.push_back(std::move(ins));
    index.emplace(p.get(), instrs_.size() - 1);
    return instrs_.size() - 1;
  };
  root_ = compile(e.node_);
}

ComplexReal CompiledExpr::operator()(Real at) const {
  std::vector<ComplexReal> memo(instrs_.size());
  std::vector<char> done(instrs_.size(), 0);
  return eval(root_, at, memo, done);
}

ComplexReal CompiledExpr::eval(std::size_t idx, Real at, std::vector<ComplexReal>& memo,
                               std::vector<char>& done) const {
  if (done[idx]) return memo[idx];
  const Instr& ins = instrs_[idx];
  ComplexReal r;
  using K = SmoothExpr::Kind;
  switch (ins.kind) {
    case K::kConst:
      r = ins.value;
      break;
    case K::kVar:
      r = at;
      break;
    case K::kAdd:
      r = eval(ins.a, at, memo, done) + eval(ins.b, at, memo, done);
      break;
    case K::kMul: {
      r = eval(ins.a, at, memo, done);
      if (r != ComplexReal(0)) r *= eval(ins.b, at, memo, done);
      break;
    }
    case K::kDiv: {
      r = eval(ins.a, at, memo, done);
      if (r != ComplexReal(0)) r /= eval(ins.b, at, memo, done);
      break;
    }
    case K::kPow:
      r = std::pow(eval(ins.a, at, memo, done), static_cast<int>(ins.n));
      break;
    case K::kKernel:
      r = kernel_value(eval(ins.a, at, memo, done).real(), ins.n);
      break;
    case K::kSupport: {
      bool in = false;
      for (const auto& [lo, hi] : ins.support) {
        if (lo <= at && at <= hi) {
          in = true;
          break;
        }
      }
      r = in ? eval(ins.a, at, memo, done) : ComplexReal(0);
      break;
    }
  }
  memo[idx] = r;
  done[idx] = 1;
  return r;
}

SmoothExpr rising_edge(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw PreconditionError("rising edge needs lo < hi");
  SmoothExpr x = SmoothExpr::x();
  SmoothExpr up = SmoothExpr::kernel(x - SmoothExpr::constant(lo));
  SmoothExpr down = SmoothExpr::kernel(SmoothExpr::constant(hi) - x);
  return up / (up + down);
}

SmoothExpr falling_edge(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw PreconditionError("falling edge needs lo < hi");
  SmoothExpr x = SmoothExpr::x();
  SmoothExpr stay = SmoothExpr::kernel(SmoothExpr::constant(hi) - x);
  SmoothExpr leave = SmoothExpr::kernel(x - SmoothExpr::constant(lo));
  return stay / (stay + leave);
}

SmoothExpr bump(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  if (!(a < b && b <= c && c < d)) {
    throw PreconditionError("bump breakpoints must satisfy a < b <= c < d");
  }
  SmoothExpr shape = rising_edge(a, b) * falling_edge(c, d);
  certify_quotients(shape, IntervalSet::line());
  return SmoothExpr::with_support(shape, IntervalSet::closed(a, d));
}

namespace {

bool certify_piece(const SmoothExpr& e, Real lo, Real hi, int depth) {
  RealInterval r = e.enclose({lo, hi});
  if (r.lo > 0) return true;
  if (r.hi <= 0 || depth == 0) return false;
  Real mid;
  if (std::isinf(lo) && std::isinf(hi)) {
    mid = 0;
  } else if (std::isinf(lo)) {
    mid = hi - std::max<Real>(1, std::abs(hi));
  } else if (std::isinf(hi)) {
    mid = lo + std::max<Real>(1, std::abs(lo));
  } else {
    mid = lo + (hi - lo) / 2;
    if (!(lo < mid && mid < hi)) return false;
  }
  return certify_piece(e, lo, mid, depth - 1) && certify_piece(e, mid, hi, depth - 1);
}

}  // namespace

bool certify_positive(const SmoothExpr& e, const IntervalSet& region) {
  if (!e.is_real()) return false;
  constexpr Real kMargin = 1.0L / (1ULL << 30);
  for (const auto& iv : region.pieces()) {
    Real lo = iv.lo.to_real();
    Real hi = iv.hi.to_real();
    Real span = (std::isfinite(lo) && std::isfinite(hi)) ? hi - lo : 1;
    if (std::isfinite(lo) && !iv.lo_closed) lo += span * kMargin;
    if (std::isfinite(hi) && !iv.hi_closed) hi -= span * kMargin;
    if (!certify_piece(e, lo, hi, 60)) return false;
  }
  return true;
}

void certify_quotients(const SmoothExpr& e, const IntervalSet& region) {
  for (const auto& den : e.denominators()) {
    if (!certify_positive(den, region)) {
      throw PreconditionError("cannot certify denominator " + den.to_sexpr() + " positive on " + region.to_string());
    }
  }
}

}  // namespace formalcalc
