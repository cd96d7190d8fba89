#pragma once

#include <string>
#include <vector>

#include "formalcalc/distributions.hpp"

namespace formalcalc {

/// Test sections used to decide equality of functionals.
///
/// Discrete base: the finite dual bases (point masses times y- or
/// y*-monomials), so agreement on the family is equality.
/// Line: a fixed catalogue of probes. Each component of U is clipped to a
/// bounded window [a, b] (4 units beyond a finite end for half-lines, [-2, 2]
/// for the whole line) and carries three overlapping bumps; probes are
/// bump * x^j (j <= 1) times the y-structure, plus derivative stacks I <= 1 for
/// densities and point terms at bump centres for distributions.

struct ProbeBump {
  Rational a, b, c, d;
  Rational centre() const { return (b + c) / 2; }
  SmoothExpr expr() const { return formalcalc::bump(a, b, c, d); }
};

/// The three probe bumps per component of an open line set.
std::vector<ProbeBump> probe_bumps(const IntervalSet& u);

template <class T>
struct Labeled {
  std::string label;
  T value;
};

/// Compactly supported formal functions  phi y^J  with |J| <= trunc.
/// On the line phi runs over probe bumps times x^j, j <= x_degree.
std::vector<Labeled<SupportedFormalFunction>> function_family(const BasePtr& base, const Region& u, std::size_t k,
                                                              unsigned trunc, unsigned x_degree = 1);
/// Compactly supported formal densities  tau d^I (y*)^L  with |L| <= r.
std::vector<Labeled<FormalDensity>> density_family(const BasePtr& base, const Region& u, std::size_t k, unsigned r,
                                                   unsigned x_degree = 1);
/// Compactly supported scalar formal distributions  T (y*)^L  with |L| <= r.
std::vector<Labeled<CompactFormalDistribution>> distribution_family(const BasePtr& base, const Region& u,
                                                                    std::size_t k, unsigned r);

/// Rank of an exact matrix (Gaussian elimination over Q(i)).
std::size_t exact_rank(std::vector<std::vector<ExactComplex>> rows);
/// Rank with pivots below `tol` (relative to the largest entry) treated as zero.
std::size_t numeric_rank(std::vector<std::vector<ComplexReal>> rows, Real tol);

/// Max over E-components of |a - b|; 0 when both are exact and equal.
Real max_distance(const EVector& a, const EVector& b);

}  // namespace formalcalc
