#include "cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

#include "formalcalc/checks.hpp"
#include "formalcalc/errors.hpp"
#include "formalcalc/scenario.hpp"

namespace formalcalc::cli {

using json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::string scenario;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> trunc;
  bool json = false;
};

template <class Map>
std::string pick(const std::string& given, const Map& m, const char* what) {
  if (!given.empty()) return given;
  if (m.size() == 1) return m.begin()->first;
  throw ParseError(std::string("name the ") + what + " to use (the scenario has " + std::to_string(m.size()) + ")");
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

Real tolerance(const Globals& g, const Scenario& s) {
  if (g.tol) return static_cast<Real>(*g.tol);
  if (s.tol) return static_cast<Real>(*s.tol);
  return 1e-8L;
}

int cmd_pair(const Globals& g, const std::string& dname, const std::string& fname, std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  const std::string dn = pick(dname, s.densities, "density");
  const std::string fn = pick(fname, s.functions, "function");
  const auto breakdown = pair_breakdown(s.density(dn), s.function(fn));
  Number total(0);
  for (const auto& [l, v] : breakdown) total += v;
  if (g.json) {
    json b = json::object();
    for (const auto& [l, v] : breakdown) b[l.to_csv()] = to_json(v);
    emit(out, {{"command", "pair"}, {"density", dn}, {"function", fn}, {"value", to_json(total)}, {"breakdown", b}});
  } else {
    out << "pair(" << dn << ", " << fn << ") = " << total << "\n";
    for (const auto& [l, v] : breakdown) out << "  L=(" << l.to_csv() << "): " << v << "\n";
  }
  return kPass;
}

int cmd_rho(const Globals& g, const std::string& oname, std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  const std::string on = pick(oname, s.operators, "operator");
  const FormalDensity eta = rho(s.op(on));
  if (g.json) {
    emit(out, {{"command", "rho"}, {"operator", on}, {"density", to_json(eta)}});
  } else {
    out << "rho(" << on << ") on " << eta.domain().to_string(*s.base) << "\n";
    if (eta.is_zero()) out << "  0\n";
    for (const auto& [l, stack] : eta.coeffs()) {
      for (const auto& [i, tau] : stack.terms()) {
        out << "  (y*)^(" << l.to_csv() << ") d^(" << i.to_csv() << "): " << to_json(*s.base, tau.coefficient()).dump()
            << "\n";
      }
    }
  }
  return kPass;
}

int cmd_apply(const Globals& g, const std::string& oname, const std::string& tname, const std::string& gname,
              const std::string& fname, const std::string& dname, std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  const int chosen = !oname.empty() + !tname.empty() + !gname.empty();
  if (chosen != 1) throw ParseError("apply needs exactly one of --operator, --distribution, --generalized");
  json report{{"command", "apply"}};
  EVector values;
  if (!oname.empty()) {
    const std::string fn = pick(fname, s.functions, "function");
    const DensityDiffOp& d = s.op(oname);
    const BaseDensity result = apply(d, s.function(fn));
    const Number integral = integrate(result, d.domain());
    report["operator"] = oname;
    report["function"] = fn;
    report["density"] = to_json(*s.base, result.coefficient());
    report["integral"] = to_json(integral);
    if (!g.json) {
      out << oname << "(" << fn << ") = " << to_json(*s.base, result.coefficient()).dump() << "\n";
      out << "integral = " << integral << "\n";
    }
  } else if (!tname.empty()) {
    const std::string fn = pick(fname, s.functions, "function");
    values = apply_dist(s.distribution(tname), s.supported(fn));
    report["distribution"] = tname;
    report["function"] = fn;
    if (!g.json) out << tname << "(" << fn << ") =";
  } else {
    const std::string dn = pick(dname, s.densities, "density");
    values = apply_gen(s.generalized_function(gname), s.density(dn));
    report["generalized"] = gname;
    report["density"] = dn;
    if (!g.json) out << gname << "(" << dn << ") =";
  }
  if (oname.empty()) {
    json v = json::array();
    for (const auto& x : values) v.push_back(to_json(x));
    report["values"] = v;
    if (!g.json) {
      for (const auto& x : values) out << " " << x;
      out << "\n";
    }
  }
  if (g.json) emit(out, report);
  return kPass;
}

int cmd_jet(const Globals& g, const std::string& fname, const std::string& at, std::optional<unsigned> order,
            std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  const std::string fn = pick(fname, s.functions, "function");
  const FormalFunction& u = s.function(fn);
  const unsigned r = order.value_or(u.trunc());
  if (u.trunc() < r) {
    throw TruncationError("jets up to order " + std::to_string(r) + " need truncation >= " + std::to_string(r) +
                          " (function '" + fn + "' has " + std::to_string(u.trunc()) + ")");
  }
  Point a = s.base->is_discrete() ? Point::discrete(*u.domain().point_set().begin()) : Point::line(0);
  if (!at.empty()) a = parse_point(*s.base, json(at));
  if (!u.domain().contains(a)) throw PreconditionError("the point lies outside the domain of '" + fn + "'");
  const std::size_t n = s.base->dimension();
  const std::size_t k = s.k;
  json rows = json::array();
  std::size_t nonzero = 0;
  for (const auto& ij : enumerate_upto(n + k, r)) {
    const auto& e = ij.entries();
    const MultiIndex i(std::vector<std::uint32_t>(e.begin(), e.begin() + static_cast<long>(n)));
    const MultiIndex j(std::vector<std::uint32_t>(e.begin() + static_cast<long>(n), e.end()));
    const Number v = jet(u, a, i, j);
    if (!v.is_zero()) ++nonzero;
    rows.push_back({{"I", to_json(i)}, {"J", to_json(j)}, {"value", to_json(v)}});
  }
  const bool in_ideal = jet_kernel_check(u, a, r);
  const std::size_t dim = dist_space_dimension(n, k, r);
  if (g.json) {
    emit(out, {{"command", "jet"},
               {"function", fn},
               {"at", a.to_string(*s.base)},
               {"order", r},
               {"jets", rows},
               {"nonzero", nonzero},
               {"in_m_a^r", in_ideal},
               {"dimension", dim}});
  } else {
    out << "jets of " << fn << " at " << a.to_string(*s.base) << ", |I|+|J| <= " << r << "\n";
    for (const auto& row : rows) {
      std::string i = row["I"].dump();
      std::string j = row["J"].dump();
      out << "  I=" << std::left << std::setw(8) << i << " J=" << std::setw(10) << j << " "
          << row["value"].get<std::string>() << "\n";
    }
    out << "in m_a^" << r << ": " << (in_ideal ? "yes" : "no") << "\n";
    out << "dimension: " << dim << "\n";
  }
  return kPass;
}

int cmd_check(const Globals& g, const std::vector<std::string>& suites, std::size_t count, std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  CheckOptions opt;
  opt.tol = tolerance(g, s);
  opt.seed = g.seed.value_or(s.seed.value_or(0));
  opt.count = count;
  const std::vector<std::string> requested = suites.empty() ? s.checks : suites;
  const auto names = expand_suites(requested);
  const CheckReport rep = run_checks(s, names, opt);
  if (g.json) {
    json j{{"command", "check"}, {"suites_run", names}, {"seed", opt.seed}, {"tol", static_cast<double>(opt.tol)}};
    const json body = to_json(rep);
    for (const auto& [key, value] : body.items()) j[key] = value;
    emit(out, j);
  } else {
    for (const auto& sum : rep.suites) {
      out << (sum.failed ? "FAIL " : "PASS ") << std::left << std::setw(8) << sum.name << " checks=" << sum.checks
          << " failed=" << sum.failed << " max_residual=" << static_cast<double>(sum.max_residual) << "\n";
    }
    for (const auto& f : rep.failures) {
      out << "  witness [" << f.suite << "] " << f.check;
      if (f.residual) out << " residual=" << static_cast<double>(*f.residual);
      if (!f.witness.empty()) out << ": " << f.witness;
      out << "\n";
    }
    out << (rep.pass ? "PASS" : "FAIL") << " (" << rep.checks << " checks, max residual "
        << static_cast<double>(rep.max_residual) << ")\n";
  }
  return rep.pass ? kPass : kCheckFailure;
}

int cmd_pou(const Globals& g, const std::string& cname, std::ostream& out) {
  const Scenario s = load_scenario(g.scenario, g.trunc);
  const std::string cn = pick(cname, s.covers, "cover");
  const Cover& c = s.cover(cn);
  const PartitionOfUnity pou = build_pou(c, s.k, s.trunc);
  const Real residual = pou_residual(pou);
  const bool ok = residual <= tolerance(g, s);
  json parts = json::array();
  for (std::size_t a = 0; a < c.size(); ++a) {
    parts.push_back({{"part", to_json(*s.base, c.parts()[a])},
                     {"support", to_json(*s.base, pou[a].support())},
                     {"f", to_json(*s.base, pou[a].function().coeff(MultiIndex(s.k)))}});
  }
  if (g.json) {
    emit(out, {{"command", "pou"}, {"cover", cn}, {"pass", ok}, {"residual", static_cast<double>(residual)},
               {"functions", parts}});
  } else {
    out << "partition of unity for " << cn << " (" << c.size() << " parts)\n";
    for (const auto& p : parts) {
      out << "  part " << p["part"].dump() << " support " << p["support"].dump() << "\n";
      if (s.base->is_discrete()) out << "    f = " << p["f"].dump() << "\n";
    }
    out << (ok ? "PASS" : "FAIL") << " sum residual " << static_cast<double>(residual) << "\n";
  }
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and numeric calculus of formal functions, densities and distributions"};
  app.name("formalcalc");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--tol", g.tol, "Tolerance for numeric checks");
  app.add_option("--seed", g.seed, "64-bit seed for randomized suites");
  app.add_option("--trunc", g.trunc, "Override the scenario truncation order");
  app.add_flag("--json", g.json, "Emit a JSON report");

  std::string density, function, op, dist, gen, cover, at;
  std::optional<unsigned> order;
  std::vector<std::string> suites;
  std::size_t count = 0;

  auto* pair_cmd = app.add_subcommand("pair", "Pair a density with a function");
  pair_cmd->add_option("--density", density);
  pair_cmd->add_option("--function", function);
  auto* rho_cmd = app.add_subcommand("rho", "Density of a differential operator");
  rho_cmd->add_option("--operator", op);
  auto* apply_cmd = app.add_subcommand("apply", "Apply an operator, distribution or generalized function");
  apply_cmd->add_option("--operator", op);
  apply_cmd->add_option("--distribution", dist);
  apply_cmd->add_option("--generalized", gen);
  apply_cmd->add_option("--function", function);
  apply_cmd->add_option("--density", density);
  auto* jet_cmd = app.add_subcommand("jet", "Tabulate jets at a point");
  jet_cmd->add_option("--function", function);
  jet_cmd->add_option("--at", at, "Point label or rational coordinate");
  jet_cmd->add_option("--order", order, "Maximal |I|+|J|");
  auto* check_cmd = app.add_subcommand("check", "Run property suites");
  check_cmd->add_option("suite", suites, "mv|glue|cosheaf|flabby|duality|jets|all");
  check_cmd->add_option("--count", count, "Random instances per configuration");
  auto* pou_cmd = app.add_subcommand("pou", "Build a partition of unity");
  pou_cmd->add_option("--cover", cover);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kInputError;
  }
  if (g.scenario.empty()) {
    err << "error: --scenario is required\n";
    return kInputError;
  }
  try {
    if (pair_cmd->parsed()) return cmd_pair(g, density, function, out);
    if (rho_cmd->parsed()) return cmd_rho(g, op, out);
    if (apply_cmd->parsed()) return cmd_apply(g, op, dist, gen, function, density, out);
    if (jet_cmd->parsed()) return cmd_jet(g, function, at, order, out);
    if (check_cmd->parsed()) return cmd_check(g, suites, count, out);
    if (pou_cmd->parsed()) return cmd_pou(g, cover, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace formalcalc::cli
