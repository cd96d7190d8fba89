#pragma once

#include <string>
#include <vector>

#include "doctest.h"
#include "formalcalc/formal_density.hpp"

namespace fc = formalcalc;

inline fc::BasePtr points(std::vector<std::string> labels) { return fc::BaseSpace::discrete(std::move(labels)); }

inline fc::Region pts(std::set<std::size_t> s) { return fc::Region::points(std::move(s)); }

inline fc::Region open_iv(const fc::ExtRational& a, const fc::ExtRational& b) {
  return fc::Region::intervals(fc::IntervalSet::open(a, b));
}

inline fc::Rational q(long p, long d = 1) {
  fc::Rational r(p, d);
  r.canonicalize();
  return r;
}

inline fc::BaseFunction values(fc::PointValues v) { return fc::BaseFunction(std::move(v)); }

inline fc::BaseFunction expr(const std::string& s) { return fc::BaseFunction(fc::SmoothExpr::parse(s)); }

inline fc::Number exact(long p, long d = 1) { return fc::Number(q(p, d)); }

inline double re(const fc::Number& n) { return static_cast<double>(n.to_complex().real()); }
