#include "formalcalc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "formalcalc/errors.hpp"
#include "formalcalc/families.hpp"
#include "formalcalc/random.hpp"

namespace formalcalc {

using json = nlohmann::ordered_json;

std::vector<std::string> expand_suites(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& s : all_suites()) add(s);
    } else if (std::find(all_suites().begin(), all_suites().end(), n) != all_suites().end()) {
      add(n);
    } else {
      throw ParseError("unknown suite '" + n + "' (expected mv|glue|cosheaf|flabby|duality|jets|all)");
    }
  }
  return out;
}

namespace {

class Recorder {
 public:
  Recorder(std::string suite, Real tol) : tol_(tol) { summary_.name = std::move(suite); }

  void record(const std::string& check, Real residual, const std::string& witness = "") {
    ++summary_.checks;
    summary_.max_residual = std::max(summary_.max_residual, residual);
    if (!(residual <= tol_)) {
      ++summary_.failed;
      failures_.push_back({summary_.name, check, residual, witness});
    }
  }

  void fail(const std::string& check, const std::string& witness) {
    ++summary_.checks;
    ++summary_.failed;
    failures_.push_back({summary_.name, check, std::nullopt, witness});
  }

  // Runs one check body; library errors count as failures of that check.
  void run(const std::string& check, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      fail(check, e.what());
    }
  }

  SuiteSummary summary() const { return summary_; }
  const std::vector<CheckFailure>& failures() const { return failures_; }

 private:
  Real tol_;
  SuiteSummary summary_;
  std::vector<CheckFailure> failures_;
};

struct Ctx {
  const Scenario& s;
  const CheckOptions& opt;
  Rng rng;
  std::size_t count;
  unsigned r;  // order used for random instances and probe families
  Recorder rec;
  bool exact() const { return s.base->is_discrete(); }
};

Real gap(const EVector& a, const EVector& b) { return max_distance(a, b); }

// max over function probes of |<a - b, u>|, both extended to `w`.
Real density_gap(Ctx& c, const FormalDensity& a, const FormalDensity& b, const Region& w) {
  const FormalDensity diff = ext(a, w) - ext(b, w);
  if (diff.is_zero()) return 0;
  Real worst = 0;
  const unsigned r = std::max(diff.star_degree(), c.r);
  for (const auto& probe : function_family(c.s.base, w, c.s.k, r)) {
    worst = std::max(worst, pair(diff, probe.value.function(), c.opt.quadrature).abs());
  }
  return worst;
}

Real distribution_gap(Ctx& c, const FormalDistribution& a, const FormalDistribution& b) {
  Real worst = 0;
  const unsigned r = std::max({a.star_degree(), b.star_degree(), c.r});
  for (const auto& probe : function_family(c.s.base, a.domain(), c.s.k, r)) {
    worst = std::max(worst, gap(apply_dist(a, probe.value, c.opt.quadrature), apply_dist(b, probe.value, c.opt.quadrature)));
  }
  return worst;
}

Real generalized_gap(Ctx& c, const GeneralizedFunction& a, const GeneralizedFunction& b) {
  Real worst = 0;
  for (const auto& probe : density_family(c.s.base, a.domain(), c.s.k, std::min(a.trunc(), b.trunc()))) {
    worst = std::max(worst, gap(apply_gen(a, probe.value, c.opt.quadrature), apply_gen(b, probe.value, c.opt.quadrature)));
  }
  return worst;
}

Region random_subset(Rng& rng, const Region& u) {
  std::set<std::size_t> pts;
  for (auto p : u.point_set()) {
    if (rng.chance(1, 2)) pts.insert(p);
  }
  if (pts.empty() && !u.point_set().empty()) {
    auto it = u.point_set().begin();
    std::advance(it, rng.uniform(0, static_cast<int>(u.point_set().size()) - 1));
    pts.insert(*it);
  }
  return Region::points(std::move(pts));
}

// ---------------------------------------------------------------- mv

void suite_mv(Ctx& c) {
  for (const auto& [name, cover] : c.s.covers) {
    for (std::size_t a = 0; a < cover.size(); ++a) {
      for (std::size_t b = a + 1; b < cover.size(); ++b) {
        const Region& u1 = cover.parts()[a];
        const Region& u2 = cover.parts()[b];
        const Region v = u1.intersect(u2);
        if (v.empty()) continue;
        for (std::size_t n = 0; n < c.count; ++n) {
          const std::string id = name + "[" + std::to_string(a) + "," + std::to_string(b) + "]#" + std::to_string(n);
          const FormalDensity zeta = random_density(c.rng, c.s.base, v, c.s.k, c.r);
          c.rec.run("phi(psi(zeta)) = 0 " + id, [&] {
            auto [p1, p2] = mv_psi(zeta, u1, u2);
            const FormalDensity phi = mv_phi(p1, p2);
            c.rec.record("phi(psi(zeta)) = 0 " + id, phi.is_zero() ? 0 : density_gap(c, phi, FormalDensity::zero(c.s.base, phi.domain(), c.s.k), phi.domain()));
          });
          c.rec.run("mv_split " + id, [&] {
            auto [p1, p2] = mv_psi(zeta, u1, u2);
            const MvSplit split = mv_split(p1, p2, c.opt.tol, c.opt.quadrature);
            Real res = split.residual;
            if (c.exact() && !(ext(split.eta, u1) == p1 && ext(split.eta, u2) == p2.scaled(-1))) res = std::max<Real>(res, 1);
            c.rec.record("mv_split " + id, res);
          });
        }
      }
    }
  }
  for (const auto& req : c.s.mv) {
    const std::string id = "mv_split(" + req.eta1 + ", " + req.eta2 + ")";
    c.rec.run(id, [&] {
      const FormalDensity& e1 = c.s.density(req.eta1);
      const FormalDensity& e2 = c.s.density(req.eta2);
      const MvSplit split = mv_split(e1, e2, c.opt.tol, c.opt.quadrature);
      Real res = split.residual;
      if (c.exact() && !(ext(split.eta, e1.domain()) == e1 && ext(split.eta, e2.domain()) == e2.scaled(-1))) {
        res = std::max<Real>(res, 1);
      }
      c.rec.record(id, res);
    });
  }
}

// ---------------------------------------------------------------- glue

template <class Section>
void record_roundtrip(Ctx& c, const std::string& id, const Cover& cover, const std::vector<Section>& locals,
                      const Section& glued) {
  Real res = 0;
  for (std::size_t a = 0; a < cover.size(); ++a) {
    if constexpr (std::is_same_v<Section, GeneralizedFunction>) {
      res = std::max(res, generalized_gap(c, glued.restrict(cover.parts()[a]), locals[a]));
    } else {
      res = std::max(res, distribution_gap(c, glued.restrict(cover.parts()[a]), locals[a]));
    }
  }
  c.rec.record(id, res);
}

std::string incompat_witness(const IncompatibleError& e) {
  std::ostringstream os;
  os << "locals " << e.alpha << " and " << e.beta << " disagree on " << e.test << " (residual "
     << static_cast<double>(e.residual) << ")";
  return os.str();
}

void suite_glue(Ctx& c) {
  for (const auto& [name, cover] : c.s.covers) {
    std::optional<PartitionOfUnity> pou;
    c.rec.run("partition of unity " + name, [&] { pou = build_pou(cover, c.s.k, c.r); });
    if (!pou) continue;
    for (std::size_t n = 0; n < c.count; ++n) {
      const std::string id = name + "#" + std::to_string(n);
      const auto g = random_generalized(c.rng, c.s.base, cover.whole(), c.s.k, c.r, c.s.e_dim);
      c.rec.run("glue generalized " + id, [&] {
        std::vector<GeneralizedFunction> locals;
        for (const auto& part : cover.parts()) locals.push_back(g.restrict(part));
        const GeneralizedFunction glued = sheaf_glue(locals, *pou, c.opt.tol, c.opt.quadrature);
        c.rec.record("glue generalized " + id, generalized_gap(c, glued, g));
        record_roundtrip(c, "restrict(glue) generalized " + id, cover, locals, glued);
      });
      const auto d = random_distribution(c.rng, c.s.base, cover.whole(), c.s.k, c.r, c.s.e_dim);
      c.rec.run("glue distribution " + id, [&] {
        std::vector<FormalDistribution> locals;
        for (const auto& part : cover.parts()) locals.push_back(d.restrict(part));
        const FormalDistribution glued = sheaf_glue(locals, *pou, c.opt.tol, c.opt.quadrature);
        c.rec.record("glue distribution " + id, distribution_gap(c, glued, d));
      });
    }
  }
  for (const auto& req : c.s.glue) {
    const std::string id = "glue " + req.cover;
    const Cover& cover = c.s.cover(req.cover);
    try {
      const PartitionOfUnity pou = build_pou(cover, c.s.k, c.s.trunc);
      if (c.s.generalized.count(req.locals.front())) {
        std::vector<GeneralizedFunction> locals;
        for (const auto& l : req.locals) locals.push_back(c.s.generalized_function(l));
        const GeneralizedFunction glued = sheaf_glue(locals, pou, c.opt.tol, c.opt.quadrature);
        record_roundtrip(c, id, cover, locals, glued);
      } else {
        std::vector<FormalDistribution> locals;
        for (const auto& l : req.locals) locals.push_back(c.s.distribution(l));
        const FormalDistribution glued = sheaf_glue(locals, pou, c.opt.tol, c.opt.quadrature);
        record_roundtrip(c, id, cover, locals, glued);
      }
    } catch (const IncompatibleError& e) {
      c.rec.record(id, e.residual, incompat_witness(e));
    } catch (const Error& e) {
      c.rec.fail(id, e.what());
    }
  }
}

// ---------------------------------------------------------------- cosheaf

void suite_cosheaf(Ctx& c) {
  for (const auto& [name, cover] : c.s.covers) {
    std::optional<PartitionOfUnity> pou;
    c.rec.run("partition of unity " + name, [&] { pou = build_pou(cover, c.s.k, c.r); });
    if (!pou) continue;
    const Region& m = cover.whole();
    auto density_roundtrip = [&](const std::string& id, const FormalDensity& eta) {
      c.rec.run(id, [&] {
        FormalDensity sum = FormalDensity::zero(c.s.base, m, c.s.k);
        for (const auto& l : cosheaf_decompose(eta, *pou)) sum = sum + ext(l, m);
        c.rec.record(id, (c.exact() && sum == eta) ? 0 : density_gap(c, sum, eta, m));
      });
    };
    for (std::size_t n = 0; n < c.count; ++n) {
      const std::string id = name + "#" + std::to_string(n);
      density_roundtrip("densities " + id, random_density(c.rng, c.s.base, m, c.s.k, c.r));

      const auto u = random_compact_function(c.rng, c.s.base, m, c.s.k, c.r);
      c.rec.run("functions " + id, [&] {
        FormalFunction sum = FormalFunction::zero(c.s.base, m, c.s.k, c.r);
        for (const auto& l : cosheaf_decompose(u, *pou)) sum = sum + extend_by_zero(l, m).function();
        Real res = 0;
        if (!(c.exact() && sum == u.function())) {
          for (const auto& probe : density_family(c.s.base, m, c.s.k, c.r)) {
            res = std::max(res, distance(pair(probe.value, sum, c.opt.quadrature),
                                         pair(probe.value, u.function(), c.opt.quadrature)));
          }
        }
        c.rec.record("functions " + id, res);
      });

      const auto d = CompactFormalDistribution::from(random_distribution(c.rng, c.s.base, m, c.s.k, c.r, c.s.e_dim));
      c.rec.run("distributions " + id, [&] {
        const auto locals = cosheaf_decompose(d, *pou);
        Real res = 0;
        for (const auto& probe : function_family(c.s.base, m, c.s.k, c.r)) {
          EVector total(c.s.e_dim, Number(0));
          for (const auto& l : locals) {
            const EVector v = apply_dist(ext(l, m).distribution(), probe.value, c.opt.quadrature);
            for (std::size_t e = 0; e < total.size(); ++e) total[e] += v[e];
          }
          res = std::max(res, gap(total, apply_dist(d.distribution(), probe.value, c.opt.quadrature)));
        }
        c.rec.record("distributions " + id, res);
      });
    }
    for (const auto& [dname, eta] : c.s.densities) {
      if (eta.domain() == m) density_roundtrip("density " + dname + " over " + name, eta);
    }
  }
}

// ---------------------------------------------------------------- flabby

void suite_flabby(Ctx& c) {
  std::vector<std::pair<Region, Region>> pairs;
  if (c.exact() && c.s.domain.point_set().size() <= 4) {
    const std::vector<std::size_t> pts(c.s.domain.point_set().begin(), c.s.domain.point_set().end());
    const std::size_t full = std::size_t{1} << pts.size();
    auto subset = [&](std::size_t mask) {
      std::set<std::size_t> out;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (mask >> i & 1U) out.insert(pts[i]);
      }
      return Region::points(std::move(out));
    };
    for (std::size_t um = 1; um < full; ++um) {
      for (std::size_t vm = um;; vm = (vm - 1) & um) {
        if (vm != 0) pairs.emplace_back(subset(vm), subset(um));
        if (vm == 0) break;
      }
    }
  } else {
    for (const auto& [name, cover] : c.s.covers) {
      for (std::size_t a = 0; a < cover.size(); ++a) {
        pairs.emplace_back(cover.parts()[a], cover.whole());
        for (std::size_t b = a + 1; b < cover.size(); ++b) {
          const Region v = cover.parts()[a].intersect(cover.parts()[b]);
          if (!v.empty()) pairs.emplace_back(v, cover.parts()[a]);
        }
      }
    }
  }
  const unsigned r = c.exact() ? c.r : std::min(c.r, 1U);
  const std::pair<SectionKind, const char*> kinds[] = {{SectionKind::kFunctions, "functions"},
                                                       {SectionKind::kDensities, "densities"},
                                                       {SectionKind::kDistributions, "distributions"}};
  for (const auto& [v, u] : pairs) {
    for (const auto& [kind, label] : kinds) {
      const std::string id = std::string("ext ") + label + " " + v.to_string(*c.s.base) + " -> " + u.to_string(*c.s.base);
      c.rec.run(id, [&] {
        const FlabbyReport rep = flabby_check(kind, c.s.base, v, u, c.s.k, r, c.opt.quadrature);
        c.rec.record(id, static_cast<Real>(rep.family_size - rep.rank),
                     rep.injective ? "" : "rank " + std::to_string(rep.rank) + " < " + std::to_string(rep.family_size));
      });
    }
  }
}

// ---------------------------------------------------------------- duality

SupportedFormalFunction indicator(const Scenario& s, const Region& on, unsigned trunc) {
  PointValues v;
  for (auto p : on.point_set()) v[p] = ExactComplex(1);
  return SupportedFormalFunction(
      FormalFunction(s.base, s.domain, s.k, trunc, {{MultiIndex(s.k), BaseFunction(std::move(v))}}), on);
}

SupportedFormalFunction line_cutoff(const Scenario& s, const Rational& a, const Rational& b, const Rational& cc,
                                    const Rational& d, unsigned trunc) {
  return SupportedFormalFunction::from(
      FormalFunction(s.base, s.domain, s.k, trunc, {{MultiIndex(s.k), BaseFunction(bump(a, b, cc, d))}}));
}

void suite_duality(Ctx& c) {
  const Region& m = c.s.domain;
  for (std::size_t n = 0; n < c.count; ++n) {
    const std::string id = "#" + std::to_string(n);
    c.rec.run("cutoff independence " + id, [&] {
      if (c.exact()) {
        const Region s1 = random_subset(c.rng, m);
        const Region s2 = s1.unite(random_subset(c.rng, m));
        const auto eta = ext(CompactFormalDistribution::from(
                                 random_distribution(c.rng, c.s.base, s1, c.s.k, c.r, c.s.e_dim)),
                             m);
        const auto e1 = cutoff_extend(eta, indicator(c.s, s1, c.r), s1);
        const auto e2 = cutoff_extend(eta, indicator(c.s, s2, c.r), s2);
        const FormalFunction u = random_function(c.rng, c.s.base, m, c.s.k, c.r);
        c.rec.record("cutoff independence " + id,
                     std::max(gap(e1(u), e2(u)), gap(e1(u), apply_dist(eta.distribution(), SupportedFormalFunction(u, m)))));
      } else {
        const auto bumps = probe_bumps(m.interval_set());
        if (bumps.empty()) return;
        const ProbeBump& pb = bumps[(n % bumps.size())];
        const Region inner = Region::intervals(IntervalSet::open(pb.b, pb.c));
        const auto eta = ext(CompactFormalDistribution::from(
                                 random_distribution(c.rng, c.s.base, inner, c.s.k, c.r, c.s.e_dim)),
                             m);
        const Rational b2 = (pb.a + pb.b) / 2;
        const Rational c2 = (pb.c + pb.d) / 2;
        const auto e1 = cutoff_extend(eta, line_cutoff(c.s, pb.a, pb.b, pb.c, pb.d, c.r), inner);
        const auto e2 = cutoff_extend(eta, line_cutoff(c.s, pb.a, b2, c2, pb.d, c.r),
                                      Region::intervals(IntervalSet::open(b2, c2)));
        const FormalFunction u = random_function(c.rng, c.s.base, m, c.s.k, c.r);
        c.rec.record("cutoff independence " + id, gap(e1(u, c.opt.quadrature), e2(u, c.opt.quadrature)));
      }
    });
    c.rec.run("embedding consistency " + id, [&] {
      const FormalFunction u = random_function(c.rng, c.s.base, m, c.s.k, c.r);
      const FormalDensity d = random_density(c.rng, c.s.base, m, c.s.k, c.r);
      c.rec.record("embedding consistency " + id,
                   distance(apply_gen(GeneralizedFunction::embed(u), d, c.opt.quadrature)[0], pair(d, u, c.opt.quadrature)));
    });
  }
}

// ---------------------------------------------------------------- jets

void suite_jets(Ctx& c) {
  const std::size_t n = c.s.base->dimension();
  const std::size_t k = c.s.k;
  constexpr unsigned kMaxOrder = 4;
  Point a = Point::line(0);
  if (c.exact()) {
    a = Point::discrete(*c.s.domain.point_set().begin());
  } else if (!c.s.domain.contains(a)) {
    a = Point::line(probe_bumps(c.s.domain.interval_set()).front().centre());
  }
  const std::string at = a.to_string(*c.s.base);
  c.rec.run("basis matrix at " + at, [&] {
    std::vector<std::pair<MultiIndex, MultiIndex>> idx;
    for (const auto& ij : enumerate_upto(n + k, kMaxOrder)) {
      std::vector<std::uint32_t> e = ij.entries();
      idx.emplace_back(MultiIndex(std::vector<std::uint32_t>(e.begin(), e.begin() + static_cast<long>(n))),
                       MultiIndex(std::vector<std::uint32_t>(e.begin() + static_cast<long>(n), e.end())));
    }
    Real res = 0;
    std::string witness;
    for (const auto& [i2, j2] : idx) {
      BaseFunction g = c.exact() ? BaseFunction(PointValues{{a.index(), ExactComplex(1)}})
                                 : BaseFunction(i2[0] == 0 ? SmoothExpr::constant(1)
                                                           : SmoothExpr::pow(SmoothExpr::x() - SmoothExpr::constant(a.coordinate()), i2[0]));
      const Rational norm = Rational(1) / Rational(factorial(i2) * factorial(j2));
      const FormalFunction mono =
          FormalFunction::monomial(c.s.base, c.s.domain, k, kMaxOrder, j2, g.scaled(ExactComplex(norm)));
      for (const auto& [i, j] : idx) {
        const Number v = point_apply(PointDistribution::basis(c.s.base, a, k, i, j), mono)[0];
        const Number expect = (i == i2 && j == j2) ? Number(1) : Number(0);
        const Real d = distance(v, expect);
        if (d > res) {
          res = d;
          witness = "entry (" + i.to_csv() + ";" + j.to_csv() + ") x (" + i2.to_csv() + ";" + j2.to_csv() + ")";
        }
      }
    }
    c.rec.record("basis matrix at " + at, res, witness);
  });
  for (unsigned r = 0; r <= kMaxOrder; ++r) {
    const std::string id = "dimension r=" + std::to_string(r);
    mpz_class expect;
    mpz_bin_uiui(expect.get_mpz_t(), n + k + r, n + k);
    const auto got = dist_space_dimension(n, k, r);
    c.rec.record(id, got == expect.get_ui() ? 0 : 1, std::to_string(got) + " vs " + expect.get_str());
  }
  if (k == 0) return;
  for (std::size_t m = 0; m < c.count; ++m) {
    const std::string id = "kernel " + std::to_string(m);
    c.rec.run(id, [&] {
      const unsigned r = 1 + static_cast<unsigned>(c.rng.uniform(0, 2));
      const FormalFunction u = random_function(c.rng, c.s.base, c.s.domain, k, r);
      const FormalFunction yr =
          FormalFunction::monomial(c.s.base, c.s.domain, k, r, MultiIndex::unit(k, 0),
                                   BaseFunction::constant(*c.s.base, c.s.domain, 1));
      FormalFunction w = u;
      for (unsigned t = 0; t < r; ++t) w = w * yr;
      const bool inside = jet_kernel_check(w, a, r);
      c.rec.record(id, inside ? 0 : 1, inside ? "" : "y^r * u has a nonzero jet of order < r");
    });
  }
}

}  // namespace

CheckReport run_checks(const Scenario& scenario, const std::vector<std::string>& suites, const CheckOptions& options) {
  CheckReport report;
  const bool exact = scenario.base->is_discrete();
  const std::size_t count = options.count ? options.count : (exact ? 20 : 2);
  const unsigned r = std::min(scenario.trunc, exact ? 2U : 1U);
  static const std::map<std::string, void (*)(Ctx&)> table{{"mv", suite_mv},           {"glue", suite_glue},
                                                          {"cosheaf", suite_cosheaf}, {"flabby", suite_flabby},
                                                          {"duality", suite_duality}, {"jets", suite_jets}};
  const auto names = expand_suites(suites);
  for (std::size_t i = 0; i < all_suites().size(); ++i) {
    const std::string& name = all_suites()[i];
    if (std::find(names.begin(), names.end(), name) == names.end()) continue;
    // Each suite has its own stream so its results do not depend on which others run.
    Ctx ctx{scenario, options, Rng(options.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1))), count, r,
            Recorder(name, options.tol)};
    table.at(name)(ctx);
    const SuiteSummary sum = ctx.rec.summary();
    report.checks += sum.checks;
    report.max_residual = std::max(report.max_residual, sum.max_residual);
    report.pass = report.pass && sum.failed == 0;
    report.suites.push_back(sum);
    for (const auto& f : ctx.rec.failures()) report.failures.push_back(f);
  }
  return report;
}

json to_json(const CheckReport& report) {
  json suites = json::array();
  for (const auto& s : report.suites) {
    suites.push_back({{"suite", s.name},
                      {"checks", s.checks},
                      {"failed", s.failed},
                      {"max_residual", static_cast<double>(s.max_residual)}});
  }
  json witnesses = json::array();
  for (const auto& f : report.failures) {
    json w = {{"suite", f.suite}, {"check", f.check}};
    w["residual"] = f.residual ? json(static_cast<double>(*f.residual)) : json(nullptr);
    w["witness"] = f.witness;
    witnesses.push_back(std::move(w));
  }
  return {{"pass", report.pass},
          {"checks", report.checks},
          {"max_residual", static_cast<double>(report.max_residual)},
          {"suites", suites},
          {"witnesses", witnesses}};
}

}  // namespace formalcalc
