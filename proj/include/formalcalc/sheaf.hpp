#pragma once

#include <optional>
#include <string>
#include <vector>

#include "formalcalc/diffops.hpp"
#include "formalcalc/distributions.hpp"
#include "formalcalc/errors.hpp"
#include "formalcalc/families.hpp"

namespace formalcalc {

/// Finite open cover {U_alpha} of an open set M.
class Cover {
 public:
  /// Throws unless every part is an open subset of M and the parts cover M.
  Cover(BasePtr base, Region whole, std::vector<Region> parts);

  const BasePtr& base() const { return base_; }
  const Region& whole() const { return whole_; }
  const std::vector<Region>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }

 private:
  BasePtr base_;
  Region whole_;
  std::vector<Region> parts_;
};

/// y-constant functions f_alpha on M with supp f_alpha inside U_alpha and
/// sum f_alpha = 1. Witnesses are closed sets whose trace on M lies in U_alpha.
class PartitionOfUnity {
 public:
  PartitionOfUnity(Cover cover, std::vector<SupportedFormalFunction> functions);

  const Cover& cover() const { return cover_; }
  const std::vector<SupportedFormalFunction>& functions() const { return functions_; }
  const SupportedFormalFunction& operator[](std::size_t alpha) const { return functions_[alpha]; }
  /// f_alpha as a section over U_alpha.
  FormalFunction local(std::size_t alpha) const;

 private:
  Cover cover_;
  std::vector<SupportedFormalFunction> functions_;
};

/// Discrete: first-match indicators. Line: per component C of M, each part
/// piece J = (p, q) inside C gets a bump whose edges sit at distance w and 2w
/// inside J, where w is one ninth of the smallest gap between distinct
/// finite endpoints; edges on the boundary of C are dropped. Then
/// f_alpha = (sum of alpha's bumps) / (sum of all bumps), with the denominator
/// certified positive and the sum checked against 1 on a 101-point grid per
/// component (tolerance 1e-12). Every part must be a finite union of intervals.
PartitionOfUnity build_pou(const Cover& cover, std::size_t k, unsigned trunc);

/// max |sum f_alpha - 1|: exact check on a discrete base (0 or 1), grid
/// residual (101 samples per clipped component) on the line.
Real pou_residual(const PartitionOfUnity& pou);

// ---------------------------------------------------------------- Mayer-Vietoris

/// phi(eta1, eta2) = ext_{U,U1}(eta1) + ext_{U,U2}(eta2) on U = U1 u U2.
FormalDensity mv_phi(const FormalDensity& eta1, const FormalDensity& eta2);
/// psi(eta) = (ext_{U1,V}(eta), -ext_{U2,V}(eta)).
std::pair<FormalDensity, FormalDensity> mv_psi(const FormalDensity& eta, const Region& u1, const Region& u2);

struct MvSplit {
  FormalDensity eta;         // eta' on V
  FormalDensity eta2_prime;  // the second construction, equal to -eta'
  Region shrunk1;            // V_1
  Region shrunk2;            // V_2
  Real residual;             // max over the checks below (0 when exact)
};

/// Constructs eta' on V = U1 n U2 with ext_{U1,V}(eta') = eta1 and
/// ext_{U2,V}(eta') = -eta2 by cutting off with a partition of unity on U_i
/// subordinate to {V, U_i minus cl V_i}. The precondition phi(eta1, eta2) = 0
/// and the three output identities are verified: exactly on a discrete base,
/// against the probe family within `tol` on the line. Throws PreconditionError
/// when phi(eta1, eta2) != 0 and Error when an output identity fails.
MvSplit mv_split(const FormalDensity& eta1, const FormalDensity& eta2, Real tol = 1e-8L,
                 const QuadratureOptions& options = {});

// ---------------------------------------------------------------- cosheaf right inverse

/// {(eta o f_alpha)|_{U_alpha}}.
std::vector<FormalDensity> cosheaf_decompose(const FormalDensity& eta, const PartitionOfUnity& pou);
/// {(f_alpha u)|_{U_alpha}} with compact witnesses supp f_alpha n supp u.
std::vector<SupportedFormalFunction> cosheaf_decompose(const SupportedFormalFunction& u, const PartitionOfUnity& pou);
std::vector<CompactFormalDistribution> cosheaf_decompose(const CompactFormalDistribution& eta,
                                                         const PartitionOfUnity& pou);

// ---------------------------------------------------------------- sheaf gluing

/// Raised by sheaf_glue when two locals disagree on an overlap.
class IncompatibleError : public Error {
 public:
  IncompatibleError(std::size_t alpha, std::size_t beta, std::string test, Real residual);
  std::size_t alpha;
  std::size_t beta;
  std::string test;
  Real residual;
};

/// Pairwise overlap comparison of locals on the spanning family of each
/// U_alpha n U_beta. Returns the first failure, if any.
struct Incompatibility {
  std::size_t alpha;
  std::size_t beta;
  std::string test;
  Real residual;
};
std::optional<Incompatibility> check_compatible(const std::vector<GeneralizedFunction>& locals, const Cover& cover,
                                                Real tol, const QuadratureOptions& options = {});
std::optional<Incompatibility> check_compatible(const std::vector<FormalDistribution>& locals, const Cover& cover,
                                                Real tol, const QuadratureOptions& options = {});

/// sum_alpha ext(f_alpha u'_alpha). Throws IncompatibleError first when the
/// locals are not compatible within `tol` (0 demands exact agreement).
GeneralizedFunction sheaf_glue(const std::vector<GeneralizedFunction>& locals, const PartitionOfUnity& pou,
                               Real tol = 0, const QuadratureOptions& options = {});
FormalDistribution sheaf_glue(const std::vector<FormalDistribution>& locals, const PartitionOfUnity& pou,
                              Real tol = 0, const QuadratureOptions& options = {});

// ---------------------------------------------------------------- flabbiness

enum class SectionKind { kFunctions, kDensities, kDistributions };

struct FlabbyReport {
  bool injective;
  std::size_t family_size;
  std::size_t rank;
};

/// Rank of the pairing matrix between ext_{U,V} of the spanning family on V
/// and the dual test family on U; injective iff the rank equals the family
/// size. Exact on a discrete base; numeric rank (relative tol 1e-9) on the line.
FlabbyReport flabby_check(SectionKind kind, const BasePtr& base, const Region& v, const Region& u, std::size_t k,
                          unsigned r, const QuadratureOptions& options = {});

}  // namespace formalcalc
