#include "formalcalc/quadrature.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <string>

#include "formalcalc/errors.hpp"

namespace formalcalc {

std::uint64_t QuadratureOptions::default_budget() {
  if (const char* env = std::getenv("FORMALCALC_QUAD_BUDGET")) {
    try {
      auto v = std::stoull(env);
      if (v > 0) return v;
    } catch (const std::logic_error&) {
    }
  }
  return 1'000'000;
}

namespace {

// Kronrod 15-point abscissae (positive half) and weights, with the embedded 7-point Gauss weights.
constexpr std::array<long double, 8> kXgk = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
constexpr std::array<long double, 8> kWgk = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr std::array<long double, 4> kWg = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

struct Segment {
  Real lo;
  Real hi;
  ComplexReal value;
  Real error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<ComplexReal(Real)>& f, Real lo, Real hi) {
  const Real center = (lo + hi) / 2;
  const Real half = (hi - lo) / 2;
  ComplexReal fc = f(center);
  ComplexReal kronrod = fc * kWgk[7];
  ComplexReal gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    Real dx = half * kXgk[j];
    ComplexReal sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<ComplexReal(Real)>& f, Real lo, Real hi,
                                    const QuadratureOptions& options) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw QuadratureError("quadrature over an unbounded interval");
  if (hi <= lo) return {ComplexReal(0), 0, 0};
  std::uint64_t evaluations = 0;
  auto counted = [&](Real x) {
    ++evaluations;
    ComplexReal v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw QuadratureError("integrand is not finite at x = " + std::to_string(static_cast<double>(x)));
    }
    return v;
  };
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(counted, lo, hi);
  ComplexReal total = first.value;
  Real error = first.error;
  heap.push(first);
  while (error > options.abs_tol) {
    if (evaluations + 30 > options.budget) {
      throw QuadratureError("quadrature did not reach tolerance " + std::to_string(static_cast<double>(options.abs_tol)) +
                            " within " + std::to_string(options.budget) + " evaluations (error estimate " +
                            std::to_string(static_cast<double>(error)) + ")");
    }
    Segment worst = heap.top();
    heap.pop();
    Real mid = worst.lo + (worst.hi - worst.lo) / 2;
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw QuadratureError("quadrature subdivision exhausted floating precision");
    }
    Segment left = gauss_kronrod(counted, worst.lo, mid);
    Segment right = gauss_kronrod(counted, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to avoid drift from the incremental updates.
  ComplexReal sum(0);
  Real err = 0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, evaluations};
}

}  // namespace formalcalc
