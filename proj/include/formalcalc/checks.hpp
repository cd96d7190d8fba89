#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "formalcalc/scenario.hpp"

namespace formalcalc {

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names{"mv", "glue", "cosheaf", "flabby", "duality", "jets"};
  return names;
}

/// "all" expands to every suite; unknown names throw ParseError.
std::vector<std::string> expand_suites(const std::vector<std::string>& names);

struct CheckOptions {
  std::uint64_t seed = 0;
  Real tol = 1e-8L;
  std::size_t count = 0;  // random instances per configuration; 0 picks a backend default
  QuadratureOptions quadrature;
};

struct CheckFailure {
  std::string suite;
  std::string check;
  std::optional<Real> residual;  // empty when the check threw
  std::string witness;
};

struct SuiteSummary {
  std::string name;
  std::size_t checks = 0;
  std::size_t failed = 0;
  Real max_residual = 0;
};

struct CheckReport {
  bool pass = true;
  std::size_t checks = 0;
  Real max_residual = 0;
  std::vector<SuiteSummary> suites;
  std::vector<CheckFailure> failures;
};

CheckReport run_checks(const Scenario& scenario, const std::vector<std::string>& suites, const CheckOptions& options);

nlohmann::ordered_json to_json(const CheckReport& report);

}  // namespace formalcalc
