#include "formalcalc/sheaf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "formalcalc/errors.hpp"

namespace formalcalc {

Cover::Cover(BasePtr base, Region whole, std::vector<Region> parts)
    : base_(std::move(base)), whole_(std::move(whole)), parts_(std::move(parts)) {
  if (!base_) throw PreconditionError("cover needs a base space");
  if (whole_.is_discrete() != base_->is_discrete()) throw MismatchError("cover does not match the base kind");
  if (!whole_.is_discrete() && !whole_.interval_set().is_open()) throw PreconditionError("covered set must be open");
  Region joined = Region::nothing(*base_);
  for (std::size_t a = 0; a < parts_.size(); ++a) {
    const Region& p = parts_[a];
    if (p.is_discrete() != base_->is_discrete()) throw MismatchError("cover part does not match the base kind");
    if (!p.is_discrete() && !p.interval_set().is_open()) {
      throw PreconditionError("cover part " + std::to_string(a) + " is not open");
    }
    if (!p.subset_of(whole_)) throw PreconditionError("cover part " + std::to_string(a) + " is not inside M");
    joined = joined.unite(p);
  }
  if (!(joined == whole_)) {
    throw PreconditionError("parts cover " + joined.to_string(*base_) + ", not " + whole_.to_string(*base_));
  }
}

PartitionOfUnity::PartitionOfUnity(Cover cover, std::vector<SupportedFormalFunction> functions)
    : cover_(std::move(cover)), functions_(std::move(functions)) {
  if (functions_.size() != cover_.size()) throw MismatchError("one function per cover part is required");
  for (std::size_t a = 0; a < functions_.size(); ++a) {
    const auto& f = functions_[a];
    if (!(f.function().domain() == cover_.whole())) throw MismatchError("partition functions must live on M");
    if (!f.support().intersect(cover_.whole()).subset_of(cover_.parts()[a])) {
      throw SupportError("partition function " + std::to_string(a) + " is not supported in its part");
    }
    for (const auto& [j, c] : f.function().coeffs()) {
      if (!j.is_zero() && !c.is_zero()) throw PreconditionError("partition functions must be y-constant");
    }
  }
}

FormalFunction PartitionOfUnity::local(std::size_t alpha) const {
  return functions_.at(alpha).function().restrict(cover_.parts()[alpha]);
}

namespace {

SupportedFormalFunction y_constant(const BasePtr& base, const Region& m, std::size_t k, unsigned trunc,
                                   BaseFunction g, Region witness) {
  FormalFunction::Coeffs c;
  if (!g.is_zero()) c.emplace(MultiIndex::zero(k), std::move(g));
  return SupportedFormalFunction(FormalFunction(base, m, k, trunc, std::move(c)), std::move(witness));
}

// Bounded window of a component used for certification and sampling.
std::pair<Rational, Rational> window(const Interval& c, const std::set<Rational>& ends) {
  Rational lo = c.lo.is_finite() ? c.lo.value() : (ends.empty() ? Rational(-1) : *ends.begin() - 1);
  Rational hi = c.hi.is_finite() ? c.hi.value() : (ends.empty() ? Rational(1) : *ends.rbegin() + 1);
  return {lo, hi};
}

std::vector<std::pair<Rational, Rational>> sampling_windows(const IntervalSet& m) {
  std::set<Rational> ends;
  for (const auto& piece : m.pieces()) {
    if (piece.lo.is_finite()) ends.insert(piece.lo.value());
    if (piece.hi.is_finite()) ends.insert(piece.hi.value());
  }
  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& piece : m.pieces()) out.push_back(window(piece, ends));
  return out;
}

Real grid_residual(const std::vector<SupportedFormalFunction>& fs, const IntervalSet& m) {
  std::vector<CompiledExpr> compiled;
  for (const auto& f : fs) {
    auto it = f.function().coeffs().find(MultiIndex::zero(f.function().formal_degree()));
    if (it != f.function().coeffs().end()) compiled.emplace_back(it->second.expr());
  }
  Real worst = 0;
  for (const auto& [lo, hi] : sampling_windows(m)) {
    for (int n = 0; n <= 100; ++n) {
      Rational at = lo + (hi - lo) * Rational(n + 1) / 102;
      const Real x = at.get_d();
      ComplexReal sum = 0;
      for (const auto& c : compiled) sum += c(x);
      worst = std::max(worst, std::abs(sum - ComplexReal(1)));
    }
  }
  return worst;
}

PartitionOfUnity build_line_pou(const Cover& cover, std::size_t k, unsigned trunc) {
  const BasePtr& base = cover.base();
  const IntervalSet& m = cover.whole().interval_set();
  const std::size_t n = cover.size();
  std::vector<SmoothExpr> numer(n);
  std::vector<IntervalSet> witness(n);
  SmoothExpr denom;
  IntervalSet certify_region;
  for (const auto& comp : m.pieces()) {
    const IntervalSet c_set({comp});
    std::vector<std::pair<std::size_t, Interval>> pieces;
    std::set<Rational> ends;
    if (comp.lo.is_finite()) ends.insert(comp.lo.value());
    if (comp.hi.is_finite()) ends.insert(comp.hi.value());
    for (std::size_t a = 0; a < n; ++a) {
      const IntervalSet local = cover.parts()[a].interval_set().intersect(c_set);
      for (const auto& j : local.pieces()) {
        pieces.emplace_back(a, j);
        if (j.lo.is_finite()) ends.insert(j.lo.value());
        if (j.hi.is_finite()) ends.insert(j.hi.value());
      }
    }
    Rational gap = 3;
    for (auto it = ends.begin(); it != ends.end() && std::next(it) != ends.end(); ++it) {
      gap = std::min(gap, Rational(*std::next(it) - *it));
    }
    const Rational w = gap / 9;
    for (const auto& [a, j] : pieces) {
      const bool left = !(j.lo == comp.lo);
      const bool right = !(j.hi == comp.hi);
      SmoothExpr b;
      IntervalSet supp;
      if (left && right) {
        const Rational p = j.lo.value();
        const Rational q = j.hi.value();
        b = bump(p + w, p + 2 * w, q - 2 * w, q - w);
        supp = IntervalSet::closed(p + w, q - w);
      } else if (left) {
        const Rational p = j.lo.value();
        supp = IntervalSet::closed(p + w, j.hi);
        b = SmoothExpr::with_support(rising_edge(p + w, p + 2 * w), supp);
      } else if (right) {
        const Rational q = j.hi.value();
        supp = IntervalSet::closed(j.lo, q - w);
        b = SmoothExpr::with_support(falling_edge(q - 2 * w, q - w), supp);
      } else {
        supp = c_set.closure();
        b = SmoothExpr::with_support(SmoothExpr::constant(1), supp);
      }
      numer[a] = numer[a] + b;
      witness[a] = witness[a].unite(supp);
      denom = denom + b;
    }
    const auto [lo, hi] = window(comp, ends);
    certify_region = certify_region.unite(c_set.intersect(IntervalSet::closed(lo, hi)));
  }
  // Beyond the window every edge has finished rising or falling, so the sum
  // there is a positive integer; only the window needs a certificate.
  if (!certify_positive(denom, certify_region)) {
    throw PreconditionError("cannot certify the partition denominator positive on " + certify_region.to_string());
  }
  std::vector<SupportedFormalFunction> fs;
  for (std::size_t a = 0; a < n; ++a) {
    SmoothExpr f = numer[a].is_zero() ? SmoothExpr() : SmoothExpr::with_support(numer[a] / denom, witness[a]);
    fs.push_back(y_constant(base, cover.whole(), k, trunc, BaseFunction(f), Region::intervals(witness[a])));
  }
  const Real residual = grid_residual(fs, m);
  if (!(residual <= 1e-12L)) {
    throw PreconditionError("partition of unity grid residual " + std::to_string(static_cast<double>(residual)));
  }
  return PartitionOfUnity(cover, std::move(fs));
}

}  // namespace

PartitionOfUnity build_pou(const Cover& cover, std::size_t k, unsigned trunc) {
  const BasePtr& base = cover.base();
  if (!base->is_discrete()) return build_line_pou(cover, k, trunc);
  std::vector<PointValues> values(cover.size());
  std::vector<std::set<std::size_t>> witness(cover.size());
  for (auto p : cover.whole().point_set()) {
    for (std::size_t a = 0; a < cover.size(); ++a) {
      if (cover.parts()[a].contains(Point::discrete(p))) {
        values[a][p] = ExactComplex(1);
        witness[a].insert(p);
        break;
      }
    }
  }
  std::vector<SupportedFormalFunction> fs;
  for (std::size_t a = 0; a < cover.size(); ++a) {
    fs.push_back(y_constant(base, cover.whole(), k, trunc, BaseFunction(values[a]), Region::points(witness[a])));
  }
  return PartitionOfUnity(cover, std::move(fs));
}

Real pou_residual(const PartitionOfUnity& pou) {
  const Cover& c = pou.cover();
  if (!c.base()->is_discrete()) return grid_residual(pou.functions(), c.whole().interval_set());
  FormalFunction sum = FormalFunction::zero(c.base(), c.whole(), pou[0].function().formal_degree(), 0);
  for (const auto& f : pou.functions()) sum = sum + f.function().truncated(0);
  const FormalFunction one =
      FormalFunction::constant(c.base(), c.whole(), sum.formal_degree(), 0, ExactComplex(1));
  return sum == one ? 0 : 1;
}

// ---------------------------------------------------------------- Mayer-Vietoris

FormalDensity mv_phi(const FormalDensity& eta1, const FormalDensity& eta2) {
  const Region u = eta1.domain().unite(eta2.domain());
  return ext(eta1, u) + ext(eta2, u);
}

std::pair<FormalDensity, FormalDensity> mv_psi(const FormalDensity& eta, const Region& u1, const Region& u2) {
  return {ext(eta, u1), ext(eta, u2).scaled(-1)};
}

namespace {

// max over the function family of |<a - b, u>|; exact zero on a discrete base
// exactly when a = b.
Real density_residual(const FormalDensity& a, const FormalDensity& b, const QuadratureOptions& options) {
  const unsigned r = std::max(a.star_degree(), b.star_degree());
  Real worst = 0;
  const FormalDensity diff = a - b;
  if (diff.is_zero()) return 0;
  for (const auto& probe : function_family(a.base(), a.domain(), a.formal_degree(), r)) {
    worst = std::max(worst, pair(diff, probe.value.function(), options).abs());
  }
  // A nonzero difference that no probe sees on a discrete base is impossible;
  // report it as a residual anyway.
  if (a.base()->is_discrete() && worst == 0) worst = 1;
  return worst;
}

// Open neighbourhood of the compact K whose closure lies in the open V.
IntervalSet shrink_around(const IntervalSet& k, const IntervalSet& v) {
  IntervalSet out;
  for (const auto& piece : k.pieces()) {
    const Interval* host = nullptr;
    for (const auto& c : v.pieces()) {
      if (IntervalSet({piece}).subset_of(IntervalSet({c}))) host = &c;
    }
    if (!host) throw PreconditionError("support " + k.to_string() + " is not inside the overlap " + v.to_string());
    Rational eps = 1;
    if (host->lo.is_finite()) eps = std::min(eps, Rational((piece.lo.value() - host->lo.value()) / 2));
    if (host->hi.is_finite()) eps = std::min(eps, Rational((host->hi.value() - piece.hi.value()) / 2));
    out = out.unite(IntervalSet::open(piece.lo.value() - eps, piece.hi.value() + eps));
  }
  return out;
}

}  // namespace

MvSplit mv_split(const FormalDensity& eta1, const FormalDensity& eta2, Real tol, const QuadratureOptions& options) {
  require_same_base(eta1.base(), eta2.base());
  if (eta1.formal_degree() != eta2.formal_degree()) throw MismatchError("formal degrees differ");
  const BasePtr& base = eta1.base();
  const bool exact = base->is_discrete();
  const Real accept = exact ? 0 : tol;
  const Region& u1 = eta1.domain();
  const Region& u2 = eta2.domain();
  const Region v = u1.intersect(u2);
  const std::size_t k = eta1.formal_degree();

  const FormalDensity phi = mv_phi(eta1, eta2);
  const Real pre = phi.is_zero() ? 0 : density_residual(phi, FormalDensity::zero(base, phi.domain(), k), options);
  if (pre > accept) {
    throw PreconditionError("phi(eta1, eta2) is nonzero (residual " + std::to_string(static_cast<double>(pre)) + ")");
  }

  const Region kset = support(eta1).intersect(support(eta2));
  Region vk = kset;
  if (!exact) vk = Region::intervals(shrink_around(kset.interval_set(), v.interval_set()));
  const Region closure = exact ? vk : Region::intervals(vk.interval_set().closure());
  const unsigned trunc = std::max(eta1.star_degree(), eta2.star_degree());

  auto cut = [&](const FormalDensity& eta, const Region& ui) {
    Cover c(base, ui, {v, ui.minus(closure)});
    PartitionOfUnity g = build_pou(c, k, trunc);
    return cutoff_restrict(eta, g[0], v);
  };
  FormalDensity p1 = cut(eta1, u1);
  FormalDensity p2 = cut(eta2, u2);

  Real residual = pre;
  residual = std::max(residual, density_residual(ext(p1, u1), eta1, options));
  residual = std::max(residual, density_residual(ext(p1, u2), eta2.scaled(-1), options));
  residual = std::max(residual, density_residual(p1 + p2, FormalDensity::zero(base, v, k), options));
  if (residual > accept) {
    throw Error("Mayer-Vietoris identities fail (residual " + std::to_string(static_cast<double>(residual)) + ")");
  }
  return MvSplit{p1, p2, vk, vk, residual};
}

// ---------------------------------------------------------------- cosheaf right inverse

namespace {

void require_on_whole(const Region& domain, const PartitionOfUnity& pou) {
  if (!(domain == pou.cover().whole())) throw MismatchError("section and partition live on different sets");
}

}  // namespace

std::vector<FormalDensity> cosheaf_decompose(const FormalDensity& eta, const PartitionOfUnity& pou) {
  require_on_whole(eta.domain(), pou);
  std::vector<FormalDensity> out;
  for (std::size_t a = 0; a < pou.cover().size(); ++a) {
    out.push_back(cutoff_restrict(eta, pou[a], pou.cover().parts()[a]));
  }
  return out;
}

std::vector<SupportedFormalFunction> cosheaf_decompose(const SupportedFormalFunction& u, const PartitionOfUnity& pou) {
  require_on_whole(u.function().domain(), pou);
  if (!u.is_compact()) throw SupportError("cosheaf sections need compact support");
  std::vector<SupportedFormalFunction> out;
  for (std::size_t a = 0; a < pou.cover().size(); ++a) {
    const Region& part = pou.cover().parts()[a];
    SupportedFormalFunction fu = cutoff_product(pou[a], u.function());
    Region witness = pou[a].support().intersect(u.support());
    if (!witness.is_discrete()) witness = Region::intervals(witness.interval_set().closure());
    out.emplace_back(fu.function().restrict(part), std::move(witness));
  }
  return out;
}

std::vector<CompactFormalDistribution> cosheaf_decompose(const CompactFormalDistribution& eta,
                                                         const PartitionOfUnity& pou) {
  require_on_whole(eta.distribution().domain(), pou);
  std::vector<CompactFormalDistribution> out;
  for (std::size_t a = 0; a < pou.cover().size(); ++a) {
    out.push_back(cutoff_restrict(eta, pou[a], pou.cover().parts()[a]));
  }
  return out;
}

// ---------------------------------------------------------------- sheaf gluing

IncompatibleError::IncompatibleError(std::size_t a, std::size_t b, std::string t, Real r)
    : Error("locals " + std::to_string(a) + " and " + std::to_string(b) + " disagree on " + t + " (residual " +
            std::to_string(static_cast<double>(r)) + ")"),
      alpha(a),
      beta(b),
      test(std::move(t)),
      residual(r) {}

namespace {

void require_locals(std::size_t count, const Cover& cover) {
  if (count != cover.size()) throw MismatchError("one local section per cover part is required");
}

}  // namespace

std::optional<Incompatibility> check_compatible(const std::vector<GeneralizedFunction>& locals, const Cover& cover,
                                                Real tol, const QuadratureOptions& options) {
  require_locals(locals.size(), cover);
  for (std::size_t a = 0; a < locals.size(); ++a) {
    if (!(locals[a].domain() == cover.parts()[a])) throw MismatchError("local " + std::to_string(a) + " is on the wrong part");
  }
  for (std::size_t a = 0; a < locals.size(); ++a) {
    for (std::size_t b = a + 1; b < locals.size(); ++b) {
      const Region w = cover.parts()[a].intersect(cover.parts()[b]);
      if (w.empty()) continue;
      const GeneralizedFunction ra = locals[a].restrict(w);
      const GeneralizedFunction rb = locals[b].restrict(w);
      const unsigned t = std::min(ra.trunc(), rb.trunc());
      for (const auto& probe : density_family(cover.base(), w, ra.formal_degree(), t)) {
        Real r = max_distance(apply_gen(ra, probe.value, options), apply_gen(rb, probe.value, options));
        if (r > tol) return Incompatibility{a, b, probe.label, r};
      }
    }
  }
  return std::nullopt;
}

std::optional<Incompatibility> check_compatible(const std::vector<FormalDistribution>& locals, const Cover& cover,
                                                Real tol, const QuadratureOptions& options) {
  require_locals(locals.size(), cover);
  for (std::size_t a = 0; a < locals.size(); ++a) {
    if (!(locals[a].domain() == cover.parts()[a])) throw MismatchError("local " + std::to_string(a) + " is on the wrong part");
  }
  for (std::size_t a = 0; a < locals.size(); ++a) {
    for (std::size_t b = a + 1; b < locals.size(); ++b) {
      const Region w = cover.parts()[a].intersect(cover.parts()[b]);
      if (w.empty()) continue;
      const FormalDistribution ra = locals[a].restrict(w);
      const FormalDistribution rb = locals[b].restrict(w);
      const unsigned r = std::max(ra.star_degree(), rb.star_degree());
      for (const auto& probe : function_family(cover.base(), w, ra.formal_degree(), r)) {
        Real res = max_distance(apply_dist(ra, probe.value, options), apply_dist(rb, probe.value, options));
        if (res > tol) return Incompatibility{a, b, probe.label, res};
      }
    }
  }
  return std::nullopt;
}

GeneralizedFunction sheaf_glue(const std::vector<GeneralizedFunction>& locals, const PartitionOfUnity& pou, Real tol,
                               const QuadratureOptions& options) {
  const Cover& cover = pou.cover();
  if (auto bad = check_compatible(locals, cover, tol, options)) {
    throw IncompatibleError(bad->alpha, bad->beta, bad->test, bad->residual);
  }
  std::optional<GeneralizedFunction> total;
  for (std::size_t a = 0; a < locals.size(); ++a) {
    GeneralizedFunction piece = locals[a].times(pou.local(a)).extend_by_zero(pou[a].support(), cover.whole());
    total = total ? *total + piece : piece;
  }
  return *total;
}

FormalDistribution sheaf_glue(const std::vector<FormalDistribution>& locals, const PartitionOfUnity& pou, Real tol,
                              const QuadratureOptions& options) {
  const Cover& cover = pou.cover();
  if (auto bad = check_compatible(locals, cover, tol, options)) {
    throw IncompatibleError(bad->alpha, bad->beta, bad->test, bad->residual);
  }
  std::optional<FormalDistribution> total;
  for (std::size_t a = 0; a < locals.size(); ++a) {
    FormalDistribution piece =
        extend_by_zero(module_action_dist(locals[a], pou.local(a)), pou[a].support(), cover.whole());
    total = total ? *total + piece : piece;
  }
  return *total;
}

// ---------------------------------------------------------------- flabbiness

FlabbyReport flabby_check(SectionKind kind, const BasePtr& base, const Region& v, const Region& u, std::size_t k,
                          unsigned r, const QuadratureOptions& options) {
  if (!v.subset_of(u)) throw PreconditionError("flabbiness needs V inside U");
  std::vector<std::vector<Number>> rows;
  // Tests supported in V, extended by zero, are admissible tests on U and keep the matrix well conditioned.
  // On the line they need more polynomial degrees than the family under test.
  const unsigned degree = base->is_discrete() ? 1 : 3;
  switch (kind) {
    case SectionKind::kFunctions: {
      std::vector<FormalDensity> tests;
      for (const auto& t : density_family(base, v, k, r, degree)) tests.push_back(ext(t.value, u));
      for (const auto& f : function_family(base, v, k, r)) {
        const FormalFunction e = extend_by_zero(f.value, u).function();
        std::vector<Number> row;
        for (const auto& t : tests) row.push_back(pair(t, e, options));
        rows.push_back(std::move(row));
      }
      break;
    }
    case SectionKind::kDensities:
    case SectionKind::kDistributions: {
      std::vector<SupportedFormalFunction> tests;
      for (const auto& t : function_family(base, v, k, r, degree)) tests.push_back(extend_by_zero(t.value, u));
      if (kind == SectionKind::kDensities) {
        for (const auto& d : density_family(base, v, k, r)) {
          const FormalDensity e = ext(d.value, u);
          std::vector<Number> row;
          for (const auto& t : tests) row.push_back(pair(e, t.function(), options));
          rows.push_back(std::move(row));
        }
      } else {
        for (const auto& d : distribution_family(base, v, k, r)) {
          const CompactFormalDistribution e = ext(d.value, u);
          std::vector<Number> row;
          for (const auto& t : tests) row.push_back(apply_dist(e.distribution(), t, options)[0]);
          rows.push_back(std::move(row));
        }
      }
      break;
    }
  }
  const std::size_t size = rows.size();
  bool all_exact = true;
  for (const auto& row : rows) {
    for (const auto& x : row) all_exact = all_exact && x.is_exact();
  }
  std::size_t rank = 0;
  if (all_exact) {
    std::vector<std::vector<ExactComplex>> m;
    for (const auto& row : rows) {
      std::vector<ExactComplex> e;
      for (const auto& x : row) e.push_back(x.exact());
      m.push_back(std::move(e));
    }
    rank = exact_rank(std::move(m));
  } else {
    std::vector<std::vector<ComplexReal>> m;
    for (const auto& row : rows) {
      std::vector<ComplexReal> e;
      for (const auto& x : row) e.push_back(x.to_complex());
      m.push_back(std::move(e));
    }
    rank = numeric_rank(std::move(m), 1e-9L);
  }
  return FlabbyReport{rank == size, size, rank};
}

}  // namespace formalcalc
