#include "formalcalc/scenario.hpp"

#include <fstream>
#include <sstream>

#include "formalcalc/errors.hpp"

namespace formalcalc {

using json = nlohmann::ordered_json;

namespace {

// A bare [lo, hi] pair is shorthand for a one-interval set.
json interval_list(const json& j) {
  if (j.is_array() && j.size() == 2 && !j[0].is_array() && !j[1].is_array()) return json::array({j});
  return j;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

std::string as_string(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.dump();
  fail(where, "expected a string or an integer, got " + j.dump());
}

std::uint64_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

ExactComplex as_exact(const json& j, const std::string& where) {
  if (j.is_number_integer()) return ExactComplex(Rational(j.dump()));
  if (j.is_string()) return parse_exact(j.get<std::string>());
  fail(where, "numbers must be integers or exact strings such as \"3/2+i\"; got " + j.dump());
}

Rational as_rational(const json& j, const std::string& where) {
  ExactComplex z = as_exact(j, where);
  if (!z.is_real()) fail(where, "expected a real rational");
  return z.re;
}

MultiIndex as_index(const json& j, std::size_t length, const std::string& where) {
  if (!j.is_array()) fail(where, "multi-index must be an array of integers");
  std::vector<std::uint32_t> e;
  for (const auto& x : j) e.push_back(static_cast<std::uint32_t>(as_count(x, where)));
  if (e.size() != length) {
    fail(where, "multi-index " + j.dump() + " should have length " + std::to_string(length));
  }
  return MultiIndex(std::move(e));
}

SmoothExpr as_expr(const json& j, const Region& domain, const std::string& where) {
  if (!j.is_string()) fail(where, "smooth coefficients are S-expression strings");
  SmoothExpr e = SmoothExpr::parse(j.get<std::string>());
  try {
    certify_quotients(e, domain.interval_set());
  } catch (const PreconditionError& err) {
    fail(where, err.what());
  }
  return e;
}

BaseFunction as_base_function(const BaseSpace& base, const json& j, const Region& domain, const std::string& where) {
  if (!base.is_discrete()) return BaseFunction(as_expr(j, domain, where));
  if (!j.is_object()) fail(where, "discrete coefficients are objects mapping point labels to values");
  PointValues v;
  for (const auto& [label, value] : j.items()) {
    const std::size_t p = base.index_of(label);
    if (!domain.contains(Point::discrete(p))) fail(where, "point '" + label + "' is outside the domain");
    v[p] = as_exact(value, where + "." + label);
  }
  return BaseFunction(std::move(v));
}

Region domain_of(const Scenario& s, const json& obj, const std::string& where) {
  if (obj.is_object() && obj.contains("domain")) {
    Region d = parse_open_set(*s.base, obj.at("domain"));
    if (!d.subset_of(s.domain)) fail(where, "object domain must lie inside the scenario domain");
    return d;
  }
  return s.domain;
}

FormalFunction parse_function(const Scenario& s, const json& j, const std::string& where,
                              std::optional<unsigned> trunc_override) {
  const Region d = domain_of(s, j, where);
  unsigned trunc = s.trunc;
  if (j.contains("trunc")) trunc = static_cast<unsigned>(as_count(j.at("trunc"), where + ".trunc"));
  if (trunc_override) trunc = *trunc_override;
  FormalFunction::Coeffs c;
  for (const auto& [key, value] : field(j, "coeffs", where).items()) {
    const MultiIndex jj = MultiIndex::from_csv(key, s.k);
    if (jj.degree() > trunc) continue;  // beyond the stored truncation
    c[jj] = as_base_function(*s.base, value, d, where + ".coeffs[" + key + "]");
  }
  return FormalFunction(s.base, d, s.k, trunc, std::move(c));
}

FormalDensity parse_density(const Scenario& s, const json& j, const std::string& where) {
  const Region d = domain_of(s, j, where);
  const std::size_t n = s.base->dimension();
  FormalDensity::Coeffs c;
  for (const auto& [key, terms] : field(j, "coeffs", where).items()) {
    const MultiIndex l = MultiIndex::from_csv(key, s.k);
    if (!terms.is_array()) fail(where, "density coefficients are arrays of {I, tau}");
    DistributionalBaseDensity stack;
    for (const auto& t : terms) {
      const std::string w = where + ".coeffs[" + key + "]";
      stack.add_term(as_index(field(t, "I", w), n, w + ".I"),
                     BaseDensity(as_base_function(*s.base, field(t, "tau", w), d, w + ".tau")));
    }
    if (!stack.is_zero()) c[l] = c.count(l) ? c[l] + stack : stack;
  }
  return FormalDensity(s.base, d, s.k, std::move(c));
}

DensityDiffOp parse_operator(const Scenario& s, const json& j, const std::string& where) {
  const Region d = domain_of(s, j, where);
  const std::size_t n = s.base->dimension();
  DensityDiffOp::Terms terms;
  const json& list = field(j, "terms", where);
  if (!list.is_array()) fail(where, "operator terms must be an array");
  for (const auto& t : list) {
    OpKey key{as_index(field(t, "I", where), n, where + ".I"), as_index(field(t, "L", where), s.k, where + ".L")};
    BaseDensity c(as_base_function(*s.base, field(t, "coeff", where), d, where + ".coeff"));
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(std::move(key), std::move(c));
    } else {
      it->second = it->second + c;
    }
  }
  return DensityDiffOp(s.base, d, s.k, std::move(terms));
}

BaseDistribution parse_term(const Scenario& s, const json& t, const Region& d, const std::string& where) {
  const std::string kind = as_string(field(t, "kind", where), where + ".kind");
  if (kind == "discrete") {
    if (!s.base->is_discrete()) fail(where, "discrete terms need a discrete base");
    return BaseDistribution::discrete(as_base_function(*s.base, field(t, "weights", where), d, where).values());
  }
  if (s.base->is_discrete()) fail(where, "term kind '" + kind + "' needs the line base");
  if (kind == "smooth") return BaseDistribution::smooth(as_expr(field(t, "g", where), d, where + ".g"));
  if (kind == "point") {
    const Rational at = as_rational(field(t, "at", where), where + ".at");
    unsigned order = t.contains("order") ? static_cast<unsigned>(as_count(t.at("order"), where)) : 0;
    Number weight = t.contains("weight") ? Number(as_exact(t.at("weight"), where + ".weight")) : Number(1);
    return BaseDistribution::point(at, order, weight);
  }
  fail(where, "unknown term kind '" + kind + "'");
}

std::map<MultiIndex, std::vector<BaseDistribution>> parse_dist_coeffs(const Scenario& s, const json& j,
                                                                      const Region& d, std::size_t m,
                                                                      const std::string& where) {
  std::map<MultiIndex, std::vector<BaseDistribution>> out;
  for (const auto& [key, comps] : field(j, "coeffs", where).items()) {
    const std::string w = where + ".coeffs[" + key + "]";
    const MultiIndex l = MultiIndex::from_csv(key, s.k);
    if (!comps.is_array() || comps.size() != m) {
      fail(w, "expected one term list per E-component (" + std::to_string(m) + ")");
    }
    std::vector<BaseDistribution> row;
    for (const auto& terms : comps) {
      if (!terms.is_array()) fail(w, "each E-component is an array of terms");
      BaseDistribution sum = BaseDistribution::zero(*s.base);
      for (const auto& t : terms) sum = sum + parse_term(s, t, d, w);
      row.push_back(std::move(sum));
    }
    out[l] = std::move(row);
  }
  return out;
}

std::size_t e_dim_of(const Scenario& s, const json& j, const std::string& where) {
  if (!j.contains("E_dim")) return s.e_dim;
  const auto m = static_cast<std::size_t>(as_count(j.at("E_dim"), where + ".E_dim"));
  if (m == 0) fail(where, "E_dim must be positive");
  return m;
}

template <class F>
void each_named(const json& doc, const char* key, F&& f) {
  if (!doc.contains(key)) return;
  const json& group = doc.at(key);
  if (!group.is_object()) fail(key, "expected an object of named entries");
  for (const auto& [name, value] : group.items()) {
    if (!value.is_object()) fail(std::string(key) + "." + name, "expected an object");
    f(name, value, std::string(key) + "." + name);
  }
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) throw ParseError(std::string("unknown ") + what + " '" + name + "'");
  return it->second;
}

}  // namespace

const FormalFunction& Scenario::function(const std::string& name) const { return lookup(functions, name, "function"); }
const FormalDensity& Scenario::density(const std::string& name) const { return lookup(densities, name, "density"); }
const DensityDiffOp& Scenario::op(const std::string& name) const { return lookup(operators, name, "operator"); }
const FormalDistribution& Scenario::distribution(const std::string& name) const {
  return lookup(distributions, name, "distribution");
}
const GeneralizedFunction& Scenario::generalized_function(const std::string& name) const {
  return lookup(generalized, name, "generalized function");
}
const Cover& Scenario::cover(const std::string& name) const { return lookup(covers, name, "cover"); }

SupportedFormalFunction Scenario::supported(const std::string& name) const {
  const FormalFunction& f = function(name);
  auto it = supports.find(name);
  return it == supports.end() ? SupportedFormalFunction::from(f) : SupportedFormalFunction(f, it->second);
}

Region parse_open_set(const BaseSpace& base, const json& j) {
  if (!j.is_array()) throw ParseError("sets are arrays: point labels, or [lo, hi] pairs");
  if (base.is_discrete()) {
    std::set<std::size_t> pts;
    for (const auto& x : j) pts.insert(base.index_of(as_string(x, "set")));
    return Region::points(std::move(pts));
  }
  IntervalSet s;
  for (const auto& iv : interval_list(j)) {
    if (!iv.is_array() || iv.size() != 2) throw ParseError("interval must be a [lo, hi] pair, got " + iv.dump());
    const ExtRational lo = ExtRational::parse(as_string(iv[0], "interval"));
    const ExtRational hi = ExtRational::parse(as_string(iv[1], "interval"));
    if (!(lo < hi)) throw ParseError("empty interval " + iv.dump());
    s = s.unite(IntervalSet::open(lo, hi));
  }
  return Region::intervals(std::move(s));
}

Region parse_closed_set(const BaseSpace& base, const json& j) {
  if (base.is_discrete()) return parse_open_set(base, j);
  if (!j.is_array()) throw ParseError("sets are arrays of [lo, hi] pairs");
  IntervalSet s;
  for (const auto& iv : interval_list(j)) {
    if (!iv.is_array() || iv.size() != 2) throw ParseError("interval must be a [lo, hi] pair, got " + iv.dump());
    const ExtRational lo = ExtRational::parse(as_string(iv[0], "interval"));
    const ExtRational hi = ExtRational::parse(as_string(iv[1], "interval"));
    if (hi < lo) throw ParseError("empty interval " + iv.dump());
    s = s.unite(IntervalSet::closed(lo, hi));
  }
  return Region::intervals(std::move(s));
}

Point parse_point(const BaseSpace& base, const json& j) {
  if (base.is_discrete()) return Point::discrete(base.index_of(as_string(j, "point")));
  return Point::line(as_rational(j, "point"));
}

Scenario parse_scenario(const json& doc, std::optional<unsigned> trunc_override) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  const std::string schema = as_string(field(doc, "schema", "scenario"), "schema");
  if (schema != kScenarioSchema) {
    throw ParseError("unsupported schema '" + schema + "' (expected '" + kScenarioSchema + "')");
  }
  Scenario s;
  const json& b = field(doc, "base", "scenario");
  const std::string kind = as_string(field(b, "kind", "base"), "base.kind");
  if (kind == "discrete") {
    std::vector<std::string> labels;
    for (const auto& l : field(b, "points", "base")) labels.push_back(as_string(l, "base.points"));
    s.base = BaseSpace::discrete(std::move(labels));
  } else if (kind == "line") {
    s.base = BaseSpace::smooth_line();
  } else {
    throw ParseError("base.kind must be \"discrete\" or \"line\"");
  }
  if (doc.contains("k")) s.k = as_count(doc.at("k"), "k");
  if (doc.contains("trunc")) s.trunc = static_cast<unsigned>(as_count(doc.at("trunc"), "trunc"));
  if (trunc_override) s.trunc = *trunc_override;
  if (doc.contains("E_dim")) {
    s.e_dim = as_count(doc.at("E_dim"), "E_dim");
    if (s.e_dim == 0) throw ParseError("E_dim must be positive");
  }
  s.domain = doc.contains("domain") ? parse_open_set(*s.base, doc.at("domain")) : Region::whole(*s.base);
  if (doc.contains("tol")) {
    if (!doc.at("tol").is_number() || doc.at("tol").get<double>() < 0) throw ParseError("tol must be >= 0");
    s.tol = doc.at("tol").get<double>();
  }
  if (doc.contains("seed")) s.seed = as_count(doc.at("seed"), "seed");
  if (doc.contains("check")) {
    const json& c = doc.at("check");
    if (c.is_string()) {
      s.checks.push_back(c.get<std::string>());
    } else if (c.is_array()) {
      for (const auto& x : c) s.checks.push_back(as_string(x, "check"));
    } else {
      throw ParseError("check must be a suite name or a list of suite names");
    }
  }

  each_named(doc, "functions", [&](const std::string& name, const json& j, const std::string& where) {
    FormalFunction f = parse_function(s, j, where, trunc_override);
    if (j.contains("support")) {
      Region w = parse_closed_set(*s.base, j.at("support"));
      s.supports.emplace(name, w);
      (void)SupportedFormalFunction(f, w);  // validates the witness
    }
    s.functions.emplace(name, std::move(f));
  });
  each_named(doc, "densities", [&](const std::string& name, const json& j, const std::string& where) {
    s.densities.emplace(name, parse_density(s, j, where));
  });
  each_named(doc, "operators", [&](const std::string& name, const json& j, const std::string& where) {
    s.operators.emplace(name, parse_operator(s, j, where));
  });
  each_named(doc, "distributions", [&](const std::string& name, const json& j, const std::string& where) {
    const Region d = domain_of(s, j, where);
    const std::size_t m = e_dim_of(s, j, where);
    s.distributions.emplace(name, FormalDistribution(s.base, d, s.k, m, parse_dist_coeffs(s, j, d, m, where)));
  });
  each_named(doc, "generalized", [&](const std::string& name, const json& j, const std::string& where) {
    const Region d = domain_of(s, j, where);
    const std::size_t m = e_dim_of(s, j, where);
    unsigned trunc = j.contains("trunc") ? static_cast<unsigned>(as_count(j.at("trunc"), where)) : s.trunc;
    if (trunc_override) trunc = *trunc_override;
    auto coeffs = parse_dist_coeffs(s, j, d, m, where);
    std::erase_if(coeffs, [&](const auto& kv) { return kv.first.degree() > trunc; });
    s.generalized.emplace(name, GeneralizedFunction(s.base, d, s.k, trunc, m, std::move(coeffs)));
  });
  each_named(doc, "covers", [&](const std::string& name, const json& j, const std::string& where) {
    Region whole = j.contains("whole") ? parse_open_set(*s.base, j.at("whole")) : s.domain;
    std::vector<Region> parts;
    const json& list = field(j, "parts", where);
    if (!list.is_array() || list.empty()) fail(where, "parts must be a non-empty array of sets");
    for (const auto& p : list) parts.push_back(parse_open_set(*s.base, p));
    try {
      s.covers.emplace(name, Cover(s.base, std::move(whole), std::move(parts)));
    } catch (const PreconditionError& e) {
      fail(where, e.what());
    }
  });
  if (doc.contains("glue")) {
    for (const auto& g : doc.at("glue")) {
      GlueRequest r{as_string(field(g, "cover", "glue"), "glue.cover"), {}};
      for (const auto& l : field(g, "locals", "glue")) r.locals.push_back(as_string(l, "glue.locals"));
      const Cover& c = s.cover(r.cover);
      if (r.locals.size() != c.size()) throw ParseError("glue: need one local section per cover part");
      for (std::size_t a = 0; a < r.locals.size(); ++a) {
        const std::string& l = r.locals[a];
        const Region* dom = nullptr;
        if (s.generalized.count(l)) {
          dom = &s.generalized.at(l).domain();
        } else if (s.distributions.count(l)) {
          dom = &s.distributions.at(l).domain();
        } else {
          throw ParseError("glue: unknown local section '" + l + "'");
        }
        if (!(*dom == c.parts()[a])) throw ParseError("glue: local '" + l + "' must live on its cover part");
      }
      s.glue.push_back(std::move(r));
    }
  }
  if (doc.contains("mv")) {
    for (const auto& m : doc.at("mv")) {
      MvRequest r{as_string(field(m, "eta1", "mv"), "mv.eta1"), as_string(field(m, "eta2", "mv"), "mv.eta2")};
      (void)s.density(r.eta1);
      (void)s.density(r.eta2);
      s.mv.push_back(std::move(r));
    }
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text, std::optional<unsigned> trunc_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_scenario(doc, trunc_override);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path, std::optional<unsigned> trunc_override) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), trunc_override);
}

// ---------------------------------------------------------------- output

json to_json(const Number& z) { return z.to_string(); }

json to_json(const MultiIndex& m) { return m.entries(); }

json to_json(const BaseSpace& base, const Region& r) {
  json out = json::array();
  if (r.is_discrete()) {
    for (auto p : r.point_set()) out.push_back(base.labels()[p]);
    return out;
  }
  for (const auto& iv : r.interval_set().pieces()) {
    out.push_back({iv.lo.to_string(), iv.hi.to_string()});
  }
  return out;
}

json to_json(const BaseSpace& base, const BaseFunction& f) {
  if (!f.is_discrete()) return f.expr().to_sexpr();
  json out = json::object();
  for (const auto& [p, v] : f.values()) out[base.labels()[p]] = v.to_string();
  return out;
}

json to_json(const FormalFunction& u) {
  json coeffs = json::object();
  for (const auto& [j, c] : u.coeffs()) coeffs[j.to_csv()] = to_json(*u.base(), c);
  return {{"domain", to_json(*u.base(), u.domain())}, {"trunc", u.trunc()}, {"coeffs", coeffs}};
}

json to_json(const FormalDensity& eta) {
  json coeffs = json::object();
  for (const auto& [l, stack] : eta.coeffs()) {
    json terms = json::array();
    for (const auto& [i, tau] : stack.terms()) {
      terms.push_back({{"I", to_json(i)}, {"tau", to_json(*eta.base(), tau.coefficient())}});
    }
    coeffs[l.to_csv()] = terms;
  }
  return {{"domain", to_json(*eta.base(), eta.domain())}, {"coeffs", coeffs}};
}

json to_json(const BaseSpace& base, const BaseDistribution& t) {
  json terms = json::array();
  if (t.is_discrete()) {
    if (!t.weights().empty()) {
      json w = json::object();
      for (const auto& [p, v] : t.weights()) w[base.labels()[p]] = v.to_string();
      terms.push_back({{"kind", "discrete"}, {"weights", w}});
    }
    return terms;
  }
  if (!t.smooth_part().is_zero()) terms.push_back({{"kind", "smooth"}, {"g", t.smooth_part().to_sexpr()}});
  for (const auto& [key, w] : t.point_terms()) {
    terms.push_back({{"kind", "point"}, {"at", key.first.get_str()}, {"order", key.second}, {"weight", w.to_string()}});
  }
  return terms;
}

json to_json(const FormalDistribution& eta) {
  json coeffs = json::object();
  for (const auto& [l, comps] : eta.coeffs()) {
    json row = json::array();
    for (const auto& t : comps) row.push_back(to_json(*eta.base(), t));
    coeffs[l.to_csv()] = row;
  }
  return {{"domain", to_json(*eta.base(), eta.domain())}, {"E_dim", eta.e_dim()}, {"coeffs", coeffs}};
}

}  // namespace formalcalc
