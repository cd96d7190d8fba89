#include "formalcalc/families.hpp"

#include <algorithm>
#include <cmath>

#include "formalcalc/errors.hpp"

namespace formalcalc {

namespace {

std::string point_label(const BaseSpace& base, std::size_t p) { return base.labels()[p]; }

std::string index_label(const char* name, const MultiIndex& m) { return std::string(name) + "=(" + m.to_csv() + ")"; }

SmoothExpr x_power(unsigned j) { return j == 0 ? SmoothExpr::constant(1) : SmoothExpr::pow(SmoothExpr::x(), j); }

}  // namespace

std::vector<ProbeBump> probe_bumps(const IntervalSet& u) {
  std::vector<ProbeBump> out;
  for (const auto& piece : u.pieces()) {
    Rational a;
    Rational b;
    if (piece.lo.is_finite() && piece.hi.is_finite()) {
      a = piece.lo.value();
      b = piece.hi.value();
    } else if (piece.hi.is_finite()) {
      b = piece.hi.value();
      a = b - 4;
    } else if (piece.lo.is_finite()) {
      a = piece.lo.value();
      b = a + 4;
    } else {
      a = -2;
      b = 2;
    }
    if (a == b) continue;  // a single closed point cannot host a probe
    const Rational h = (b - a) / 4;
    for (int i = 0; i < 3; ++i) {
      Rational ai = a + h * i + h / 8;
      Rational di = a + h * (i + 2) - h / 8;
      out.push_back({ai, ai + h / 4, di - h / 4, di});
    }
  }
  return out;
}

std::vector<Labeled<SupportedFormalFunction>> function_family(const BasePtr& base, const Region& u, std::size_t k,
                                                              unsigned trunc, unsigned x_degree) {
  std::vector<Labeled<SupportedFormalFunction>> out;
  const auto js = enumerate_upto(k, trunc);
  if (base->is_discrete()) {
    for (auto p : u.point_set()) {
      for (const auto& j : js) {
        FormalFunction f = FormalFunction::monomial(base, u, k, trunc, j, BaseFunction(PointValues{{p, ExactComplex(1)}}));
        out.push_back({"delta(" + point_label(*base, p) + ")*y^" + index_label("J", j),
                       SupportedFormalFunction(f, Region::points({p}))});
      }
    }
    return out;
  }
  const auto bumps = probe_bumps(u.interval_set());
  for (std::size_t bi = 0; bi < bumps.size(); ++bi) {
    for (unsigned xj = 0; xj <= x_degree; ++xj) {
      BaseFunction g(bumps[bi].expr() * x_power(xj));
      for (const auto& j : js) {
        out.push_back({"bump" + std::to_string(bi) + "*x^" + std::to_string(xj) + "*y^" + index_label("J", j),
                       SupportedFormalFunction::from(FormalFunction::monomial(base, u, k, trunc, j, g))});
      }
    }
  }
  return out;
}

std::vector<Labeled<FormalDensity>> density_family(const BasePtr& base, const Region& u, std::size_t k, unsigned r,
                                                   unsigned x_degree) {
  std::vector<Labeled<FormalDensity>> out;
  const auto ls = enumerate_upto(k, r);
  if (base->is_discrete()) {
    for (auto p : u.point_set()) {
      BaseDensity tau(BaseFunction(PointValues{{p, ExactComplex(1)}}));
      for (const auto& l : ls) {
        out.push_back({"delta(" + point_label(*base, p) + ")*(y*)^" + index_label("L", l),
                       FormalDensity::monomial(base, u, k, MultiIndex(0), l, tau)});
      }
    }
    return out;
  }
  const auto bumps = probe_bumps(u.interval_set());
  for (std::size_t bi = 0; bi < bumps.size(); ++bi) {
    for (unsigned xj = 0; xj <= x_degree; ++xj) {
      BaseDensity tau(BaseFunction(bumps[bi].expr() * x_power(xj)));
      for (std::uint32_t stack = 0; stack <= 1; ++stack) {
        for (const auto& l : ls) {
          out.push_back({"bump" + std::to_string(bi) + "*x^" + std::to_string(xj) + "*d^" + std::to_string(stack) +
                             "*(y*)^" + index_label("L", l),
                         FormalDensity::monomial(base, u, k, MultiIndex{stack}, l, tau)});
        }
      }
    }
  }
  return out;
}

std::vector<Labeled<CompactFormalDistribution>> distribution_family(const BasePtr& base, const Region& u,
                                                                    std::size_t k, unsigned r) {
  std::vector<Labeled<CompactFormalDistribution>> out;
  const auto ls = enumerate_upto(k, r);
  auto make = [&](const MultiIndex& l, BaseDistribution t) {
    FormalDistribution::Coeffs c;
    c.emplace(l, std::vector<BaseDistribution>{std::move(t)});
    return CompactFormalDistribution::from(FormalDistribution(base, u, k, 1, std::move(c)));
  };
  if (base->is_discrete()) {
    for (auto p : u.point_set()) {
      for (const auto& l : ls) {
        out.push_back({"delta(" + point_label(*base, p) + ")*(y*)^" + index_label("L", l),
                       make(l, BaseDistribution::discrete(PointValues{{p, ExactComplex(1)}}))});
      }
    }
    return out;
  }
  const auto bumps = probe_bumps(u.interval_set());
  for (std::size_t bi = 0; bi < bumps.size(); ++bi) {
    for (const auto& l : ls) {
      for (unsigned xj = 0; xj <= 1; ++xj) {
        out.push_back({"bump" + std::to_string(bi) + "*x^" + std::to_string(xj) + "*(y*)^" + index_label("L", l),
                       make(l, BaseDistribution::smooth(bumps[bi].expr() * x_power(xj)))});
      }
      for (unsigned order = 0; order <= 1; ++order) {
        out.push_back({"delta^(" + std::to_string(order) + ")(" + bumps[bi].centre().get_str() + ")*(y*)^" +
                           index_label("L", l),
                       make(l, BaseDistribution::point(bumps[bi].centre(), order))});
      }
    }
  }
  return out;
}

std::size_t exact_rank(std::vector<std::vector<ExactComplex>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c].is_zero()) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const ExactComplex inv = ExactComplex(1) / rows[rank][c];
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c].is_zero()) continue;
      const ExactComplex factor = rows[r][c] * inv;
      for (std::size_t cc = c; cc < cols; ++cc) rows[r][cc] -= factor * rows[rank][cc];
    }
    ++rank;
  }
  return rank;
}

std::size_t numeric_rank(std::vector<std::vector<ComplexReal>> rows, Real tol) {
  Real scale = 0;
  for (const auto& row : rows) {
    for (const auto& v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0) return 0;
  std::size_t rank = 0;
  const std::size_t cols = rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[pivot][c])) pivot = r;
    }
    if (std::abs(rows[pivot][c]) <= tol * scale) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const ComplexReal factor = rows[r][c] / rows[rank][c];
      for (std::size_t cc = c; cc < cols; ++cc) rows[r][cc] -= factor * rows[rank][cc];
    }
    ++rank;
  }
  return rank;
}

Real max_distance(const EVector& a, const EVector& b) {
  if (a.size() != b.size()) throw MismatchError("E-vectors of different lengths");
  Real r = 0;
  for (std::size_t e = 0; e < a.size(); ++e) r = std::max(r, distance(a[e], b[e]));
  return r;
}

}  // namespace formalcalc
