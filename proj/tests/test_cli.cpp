#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "formalcalc/errors.hpp"
#include "formalcalc/scenario.hpp"
#include "helpers.hpp"

namespace {

const std::string kDir = FORMALCALC_SCENARIO_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = formalcalc::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::ordered_json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  const Run r = run(std::move(args));
  return nlohmann::ordered_json::parse(r.out);
}

std::string path(const std::string& name) { return kDir + "/" + name; }

fc::Scenario parse(const std::string& text) { return fc::parse_scenario_text(text); }

}  // namespace

TEST_CASE("pair command examples") {
  auto j = run_json({"pair", "--scenario", path("pair_examples.json"), "--density", "eta", "--function", "u"});
  CHECK(j["value"] == "3");
  CHECK(j["breakdown"]["1"] == "3");
  j = run_json({"pair", "--scenario", path("pair_examples.json"), "--density", "eta_factorial", "--function", "v"});
  CHECK(j["value"] == "10");
  j = run_json({"pair", "--scenario", path("pair_examples.json"), "--density", "zero", "--function", "u"});
  CHECK(j["value"] == "0");
  CHECK(run({"pair", "--scenario", path("pair_examples.json"), "--density", "nosuch", "--function", "u"}).code == 2);
  CHECK(run({"pair", "--scenario", path("pair_examples.json")}).code == 2);  // ambiguous names
}

TEST_CASE("check command exit codes and witnesses") {
  auto r = run({"check", "--scenario", path("discrete_demo.json"), "all", "--json"});
  CHECK(r.code == 0);
  auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["max_residual"] == 0.0);
  CHECK(j["checks"].get<int>() > 100);

  r = run({"check", "--scenario", path("corrupted_glue.json"), "--json"});
  CHECK(r.code == 1);
  j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["pass"] == false);
  REQUIRE(j["witnesses"].size() == 1);
  CHECK(j["witnesses"][0]["witness"].get<std::string>().find("delta(c)") != std::string::npos);

  r = run({"check", "--scenario", path("pair_examples.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("0 checks") != std::string::npos);
  CHECK(run({"check", "bogus", "--scenario", path("pair_examples.json")}).code == 2);
}

TEST_CASE("reports are deterministic") {
  const std::vector<std::string> args{"check", "--scenario", path("discrete_demo.json"), "--seed", "99", "--json"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.out == b.out);
  const Run c = run({"check", "--scenario", path("discrete_demo.json"), "--seed", "100", "--json"});
  CHECK(c.code == 0);
}

TEST_CASE("jet command") {
  auto j = run_json({"jet", "--scenario", path("jet_x2y.json"), "--function", "u", "--at", "0", "--order", "3"});
  CHECK(j["nonzero"] == 1);
  CHECK(j["dimension"] == 10);
  CHECK(j["in_m_a^r"] == true);
  for (const auto& row : j["jets"]) {
    const bool hit = row["I"] == nlohmann::ordered_json::array({2}) && row["J"] == nlohmann::ordered_json::array({1});
    CHECK(row["value"] == (hit ? "2" : "0"));
  }
  j = run_json({"jet", "--scenario", path("jet_x2y.json"), "--function", "zero", "--order", "2"});
  CHECK(j["nonzero"] == 0);
  CHECK(run({"jet", "--scenario", path("jet_x2y.json"), "--function", "u", "--order", "3", "--trunc", "2"}).code == 2);
}

TEST_CASE("rho, apply and pou commands") {
  auto j = run_json({"rho", "--scenario", path("discrete_demo.json"), "--operator", "D"});
  CHECK(j["density"]["coeffs"]["1"][0]["tau"]["b"] == "2");
  j = run_json({"apply", "--scenario", path("discrete_demo.json"), "--operator", "D", "--function", "u"});
  CHECK(j["integral"] == "4+2i");
  j = run_json({"apply", "--scenario", path("discrete_demo.json"), "--distribution", "T", "--function", "u"});
  CHECK(j["values"][0] == "8+4i");
  CHECK(run({"apply", "--scenario", path("discrete_demo.json"), "--function", "u"}).code == 2);
  j = run_json({"pou", "--scenario", path("discrete_demo.json"), "--cover", "ring"});
  CHECK(j["pass"] == true);
  CHECK(j["functions"][1]["f"] == nlohmann::ordered_json({{"d", "1"}, {"e", "1"}}));
  j = run_json({"pou", "--scenario", path("smooth_line.json")});
  CHECK(j["residual"].get<double>() <= 1e-12);
}

TEST_CASE("quadrature budget comes from the environment") {
  const std::vector<std::string> args{"pair", "--scenario", path("smooth_line.json"), "--density", "tau", "--function", "u"};
  CHECK(run(args).code == 0);
  setenv("FORMALCALC_QUAD_BUDGET", "5", 1);
  const Run starved = run(args);
  unsetenv("FORMALCALC_QUAD_BUDGET");
  CHECK(starved.code == 2);
  CHECK(starved.err.find("evaluations") != std::string::npos);
}

TEST_CASE("scenario validation") {
  const std::string head = R"({"schema": "formalcalc/1", "base": {"kind": "discrete", "points": ["p", "q"]}, "k": 1, "trunc": 1, )";
  CHECK_NOTHROW(parse(head + R"("functions": {"u": {"coeffs": {"0": {"p": "1/2"}}}}})"));
  CHECK_THROWS_AS(parse(R"({"base": {"kind": "line"}})"), fc::ParseError);
  CHECK_THROWS_AS(parse(R"({"schema": "formalcalc/0", "base": {"kind": "line"}})"), fc::ParseError);
  CHECK_THROWS_AS(parse(head + R"("functions": {"u": {"coeffs": {"0": {"z": 1}}}}})"), fc::ParseError);
  CHECK_THROWS_AS(parse(head + R"("functions": {"u": {"coeffs": {"0": {"p": 0.5}}}}})"), fc::ParseError);
  CHECK_THROWS_AS(parse(head + R"("functions": {"u": {"coeffs": {"0,1": {"p": 1}}}}})"), fc::ParseError);
  // no x-derivatives on a discrete base
  CHECK_THROWS_AS(parse(head + R"("densities": {"e": {"coeffs": {"0": [{"I": [1], "tau": {"p": 1}}]}}}})"),
                  fc::ParseError);
  CHECK_THROWS_AS(parse(head + R"("covers": {"c": {"parts": [["p"]]}}})"), fc::ParseError);
  CHECK_THROWS_AS(parse(head + R"("glue": [{"cover": "none", "locals": []}]})"), fc::ParseError);
  CHECK_THROWS_AS(fc::parse_scenario_text("{not json"), fc::ParseError);

  const std::string line = R"({"schema": "formalcalc/1", "base": {"kind": "line"}, "k": 0, "trunc": 0, )";
  CHECK_NOTHROW(parse(line + R"J("domain": [["0", "inf"]], "functions": {"u": {"coeffs": {"": "(/ 1 (+ x 1))"}}}})J"));
  CHECK_THROWS_AS(parse(line + R"J("functions": {"u": {"coeffs": {"": "(/ 1 x)"}}}})J"), fc::ParseError);
  CHECK_THROWS_AS(parse(line + R"J("functions": {"u": {"coeffs": {"": "(frob x)"}}}})J"), fc::ParseError);
  auto s = parse(line + R"("covers": {"c": {"whole": ["0", "3"], "parts": [["0", "2"], [["1", "3"]]]}}})");
  CHECK(s.cover("c").size() == 2);
}

TEST_CASE("serialization round trip") {
  auto s = fc::load_scenario(path("discrete_demo.json"));
  const auto& eta = s.density("eta");
  nlohmann::ordered_json doc = {{"schema", fc::kScenarioSchema},
                                {"base", {{"kind", "discrete"}, {"points", s.base->labels()}}},
                                {"k", 1},
                                {"trunc", 2},
                                {"densities", {{"eta", fc::to_json(eta)}}},
                                {"functions", {{"u", fc::to_json(s.function("u"))}}},
                                {"distributions", {{"T", fc::to_json(s.distribution("T"))}}}};
  auto back = fc::parse_scenario(doc);
  CHECK(fc::to_json(back.density("eta")) == fc::to_json(eta));
  CHECK(fc::to_json(back.function("u")) == fc::to_json(s.function("u")));
  CHECK(fc::to_json(back.distribution("T")) == fc::to_json(s.distribution("T")));
}
