#pragma once

#include <cstdint>
#include <functional>

#include "formalcalc/number.hpp"

namespace formalcalc {

struct QuadratureOptions {
  Real abs_tol = 1e-10L;
  /// Maximum integrand evaluations; default 10^6, overridable through the
  /// FORMALCALC_QUAD_BUDGET environment variable.
  std::uint64_t budget = default_budget();

  static std::uint64_t default_budget();
};

struct QuadratureResult {
  ComplexReal value;
  Real error_estimate;
  std::uint64_t evaluations;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of a complex-valued
/// integrand over the bounded interval [lo, hi]. Throws QuadratureError when
/// the absolute tolerance is not met within the evaluation budget.
QuadratureResult integrate_adaptive(const std::function<ComplexReal(Real)>& f, Real lo, Real hi,
                                    const QuadratureOptions& options = {});

}  // namespace formalcalc
