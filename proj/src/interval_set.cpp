#include "formalcalc/interval_set.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "formalcalc/errors.hpp"

namespace formalcalc {

const Rational& ExtRational::value() const {
  if (!is_finite()) throw PreconditionError("infinite endpoint has no rational value");
  return value_;
}

Real ExtRational::to_real() const {
  if (is_neg_inf()) return -std::numeric_limits<Real>::infinity();
  if (is_pos_inf()) return std::numeric_limits<Real>::infinity();
  return static_cast<Real>(value_.get_d());
}

std::string ExtRational::to_string() const {
  if (is_neg_inf()) return "-inf";
  if (is_pos_inf()) return "inf";
  return value_.get_str();
}

ExtRational ExtRational::parse(const std::string& text) {
  if (text == "-inf" || text == "-oo") return neg_inf();
  if (text == "inf" || text == "+inf" || text == "oo" || text == "+oo") return pos_inf();
  return ExtRational(parse_rational(text));
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  if (!a.is_finite()) return std::strong_ordering::equal;
  int c = cmp(a.value_, b.value_);
  return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

bool Interval::contains(const Rational& x) const {
  ExtRational p(x);
  bool above = lo_closed ? lo <= p : lo < p;
  bool below = hi_closed ? p <= hi : p < hi;
  return above && below;
}

bool Interval::contains(Real x) const {
  Real l = lo.to_real();
  Real h = hi.to_real();
  bool above = lo_closed ? l <= x : l < x;
  bool below = hi_closed ? x <= h : x < h;
  return above && below;
}

namespace {

bool nonempty(const Interval& iv) {
  if (iv.lo < iv.hi) return true;
  return iv.lo == iv.hi && iv.lo.is_finite() && iv.lo_closed && iv.hi_closed;
}

// Lower endpoint ordering: smaller value first; at equal value a closed end starts earlier.
bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return a.lo_closed && !b.lo_closed;
}

// Whether b (starting at or after a) overlaps or touches a so that their union is one interval.
bool joins(const Interval& a, const Interval& b) {
  if (b.lo < a.hi) return true;
  if (b.lo == a.hi) return a.hi_closed || b.lo_closed;
  return false;
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {
  for (auto& iv : pieces_) {
    if (!iv.lo.is_finite()) iv.lo_closed = false;
    if (!iv.hi.is_finite()) iv.hi_closed = false;
  }
  canonicalize();
}

IntervalSet IntervalSet::open(ExtRational lo, ExtRational hi) {
  return IntervalSet({Interval::open(std::move(lo), std::move(hi))});
}

IntervalSet IntervalSet::closed(ExtRational lo, ExtRational hi) {
  return IntervalSet({Interval::closed(std::move(lo), std::move(hi))});
}

void IntervalSet::canonicalize() {
  std::vector<Interval> kept;
  for (auto& iv : pieces_) {
    if (nonempty(iv)) kept.push_back(iv);
  }
  std::sort(kept.begin(), kept.end(), starts_before);
  std::vector<Interval> merged;
  for (auto& iv : kept) {
    if (!merged.empty() && joins(merged.back(), iv)) {
      auto& last = merged.back();
      if (iv.hi > last.hi) {
        last.hi = iv.hi;
        last.hi_closed = iv.hi_closed;
      } else if (iv.hi == last.hi) {
        last.hi_closed = last.hi_closed || iv.hi_closed;
      }
    } else {
      merged.push_back(iv);
    }
  }
  pieces_ = std::move(merged);
}

bool IntervalSet::bounded() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Interval& iv) { return iv.bounded(); });
}

bool IntervalSet::is_open() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Interval& iv) { return !iv.lo_closed && !iv.hi_closed; });
}

bool IntervalSet::is_closed() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Interval& iv) {
    return (iv.lo_closed || !iv.lo.is_finite()) && (iv.hi_closed || !iv.hi.is_finite());
  });
}

bool IntervalSet::contains(const Rational& x) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& iv) { return iv.contains(x); });
}

bool IntervalSet::contains(Real x) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& iv) { return iv.contains(x); });
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& a : pieces_) {
    for (const auto& b : other.pieces_) {
      Interval iv;
      if (a.lo > b.lo) {
        iv.lo = a.lo;
        iv.lo_closed = a.lo_closed;
      } else if (b.lo > a.lo) {
        iv.lo = b.lo;
        iv.lo_closed = b.lo_closed;
      } else {
        iv.lo = a.lo;
        iv.lo_closed = a.lo_closed && b.lo_closed;
      }
      if (a.hi < b.hi) {
        iv.hi = a.hi;
        iv.hi_closed = a.hi_closed;
      } else if (b.hi < a.hi) {
        iv.hi = b.hi;
        iv.hi_closed = b.hi_closed;
      } else {
        iv.hi = a.hi;
        iv.hi_closed = a.hi_closed && b.hi_closed;
      }
      if (nonempty(iv)) out.push_back(iv);
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::complement() const {
  std::vector<Interval> out;
  ExtRational cursor = ExtRational::neg_inf();
  bool cursor_closed = false;
  for (const auto& iv : pieces_) {
    Interval gap{cursor, iv.lo, cursor_closed, !iv.lo_closed};
    if (nonempty(gap)) out.push_back(gap);
    cursor = iv.hi;
    cursor_closed = !iv.hi_closed;
  }
  Interval tail{cursor, ExtRational::pos_inf(), cursor_closed, false};
  if (nonempty(tail)) out.push_back(tail);
  return IntervalSet(std::move(out));
}

bool IntervalSet::subset_of(const IntervalSet& other) const { return intersect(other) == *this; }

IntervalSet IntervalSet::closure() const {
  std::vector<Interval> out = pieces_;
  for (auto& iv : out) {
    iv.lo_closed = iv.lo.is_finite();
    iv.hi_closed = iv.hi.is_finite();
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::interior() const {
  std::vector<Interval> out = pieces_;
  for (auto& iv : out) {
    iv.lo_closed = false;
    iv.hi_closed = false;
  }
  return IntervalSet(std::move(out));
}

std::optional<std::pair<ExtRational, ExtRational>> IntervalSet::hull() const {
  if (pieces_.empty()) return std::nullopt;
  return std::make_pair(pieces_.front().lo, pieces_.back().hi);
}

std::string IntervalSet::to_string() const {
  if (pieces_.empty()) return "{}";
  std::ostringstream os;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& iv = pieces_[i];
    if (i) os << " u ";
    os << (iv.lo_closed ? '[' : '(') << iv.lo.to_string() << ", " << iv.hi.to_string()
       << (iv.hi_closed ? ']' : ')');
  }
  return os.str();
}

bool compactly_inside(const IntervalSet& compact, const IntervalSet& open) {
  return compact.bounded() && compact.is_closed() && compact.subset_of(open);
}

}  // namespace formalcalc
