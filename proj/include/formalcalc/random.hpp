#pragma once

#include <cstdint>
#include <random>

#include "formalcalc/diffops.hpp"
#include "formalcalc/distributions.hpp"

namespace formalcalc {

/// Seeded generator for randomized instances. The engine is std::mt19937_64;
/// ranges are reduced by modulo so sequences are identical across standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [lo, hi].
  int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool chance(unsigned num, unsigned den) { return next() % den < num; }
  /// p / q with |p| <= 6, 1 <= q <= 3.
  Rational small_rational();
  /// Real part always; imaginary part with probability 1/4.
  ExactComplex small_complex();

 private:
  std::mt19937_64 engine_;
};

/// Nonempty random subset of a discrete base.
Region random_point_subset(Rng& rng, const BaseSpace& base);

/// Discrete: random values on the points of U. Line: a polynomial of degree <= 2.
BaseFunction random_base_function(Rng& rng, const BasePtr& base, const Region& u);
/// Discrete: as above. Line: polynomial times one of the probe bumps of U.
BaseFunction random_compact_base_function(Rng& rng, const BasePtr& base, const Region& u);

FormalFunction random_function(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned trunc);
SupportedFormalFunction random_compact_function(Rng& rng, const BasePtr& base, const Region& u, std::size_t k,
                                                unsigned trunc);
/// Star degree <= r; line terms carry stacks I <= 1.
FormalDensity random_density(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r);
/// Terms with |I| <= 1 (line only) and |L| <= r.
DensityDiffOp random_diffop(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r);
/// Compactly supported E-valued distribution with |L| <= r. Line: smooth
/// bump-polynomial terms and point terms of order <= 1 inside U.
FormalDistribution random_distribution(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned r,
                                       std::size_t m);
/// Generalized function with |J| <= trunc; line coefficients are polynomials
/// plus point terms.
GeneralizedFunction random_generalized(Rng& rng, const BasePtr& base, const Region& u, std::size_t k, unsigned trunc,
                                       std::size_t m);
/// Terms with |I| + |J| <= r (I = 0 on a discrete base).
PointDistribution random_point_distribution(Rng& rng, const BasePtr& base, const Point& a, std::size_t k, unsigned r,
                                            std::size_t m);

}  // namespace formalcalc
