#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formalcalc/diffops.hpp"
#include "formalcalc/distributions.hpp"
#include "formalcalc/sheaf.hpp"

namespace formalcalc {

inline constexpr const char* kScenarioSchema = "formalcalc/1";

struct GlueRequest {
  std::string cover;
  std::vector<std::string> locals;  // names of generalized functions, or of distributions
};

struct MvRequest {
  std::string eta1;
  std::string eta2;
};

/// A parsed scenario file. All named objects share the base, k and E_dim.
struct Scenario {
  BasePtr base;
  std::size_t k = 0;
  unsigned trunc = 0;
  std::size_t e_dim = 1;
  Region domain;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> checks;

  std::map<std::string, FormalFunction> functions;
  std::map<std::string, Region> supports;  // optional closed witnesses for functions
  std::map<std::string, FormalDensity> densities;
  std::map<std::string, DensityDiffOp> operators;
  std::map<std::string, FormalDistribution> distributions;
  std::map<std::string, GeneralizedFunction> generalized;
  std::map<std::string, Cover> covers;
  std::vector<GlueRequest> glue;
  std::vector<MvRequest> mv;

  const FormalFunction& function(const std::string& name) const;
  const FormalDensity& density(const std::string& name) const;
  const DensityDiffOp& op(const std::string& name) const;
  const FormalDistribution& distribution(const std::string& name) const;
  const GeneralizedFunction& generalized_function(const std::string& name) const;
  const Cover& cover(const std::string& name) const;
  SupportedFormalFunction supported(const std::string& name) const;
};

/// Throws ParseError on malformed input. `trunc_override` replaces the
/// scenario-wide truncation order before any object is built.
Scenario parse_scenario(const nlohmann::ordered_json& doc, std::optional<unsigned> trunc_override = std::nullopt);
Scenario parse_scenario_text(const std::string& text, std::optional<unsigned> trunc_override = std::nullopt);
Scenario load_scenario(const std::string& path, std::optional<unsigned> trunc_override = std::nullopt);

Region parse_open_set(const BaseSpace& base, const nlohmann::ordered_json& j);
Region parse_closed_set(const BaseSpace& base, const nlohmann::ordered_json& j);
Point parse_point(const BaseSpace& base, const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const Number& z);
nlohmann::ordered_json to_json(const MultiIndex& m);
nlohmann::ordered_json to_json(const BaseSpace& base, const Region& r);
nlohmann::ordered_json to_json(const BaseSpace& base, const BaseFunction& f);
nlohmann::ordered_json to_json(const FormalFunction& u);
nlohmann::ordered_json to_json(const FormalDensity& eta);
nlohmann::ordered_json to_json(const BaseSpace& base, const BaseDistribution& t);
nlohmann::ordered_json to_json(const FormalDistribution& eta);

}  // namespace formalcalc
