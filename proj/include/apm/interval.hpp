#pragma once

#include <optional>
#include <string>

#include "apm/rational.hpp"

namespace apm {

// Bounded interval on the real line with per-endpoint openness.
// Invariant: lo <= hi.
struct Interval {
  Rational lo;
  Rational hi;
  bool lo_open = false;
  bool hi_open = false;

  static Interval closed(const Rational& lo, const Rational& hi);
  static Interval open(const Rational& lo, const Rational& hi);
  // [-r, r] or (-r, r).
  static Interval symmetric(const Rational& r, bool open);

  bool contains(const Rational& x) const;
  // Every point of *this is a point of other.
  bool subset_of(const Interval& other) const;
  bool empty() const;
  Rational length() const { return hi - lo; }

  Interval translated(const Rational& t) const;
  // Minkowski sum with [-r, r] (closed) or (-r, r) (open); r >= 0.
  Interval widened(const Rational& r, bool open_margin = false) const;
  Interval closure() const { return closed(lo, hi); }
  Interval interior() const { return open(lo, hi); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Intersection, or nullopt when it has no points.
std::optional<Interval> intersect(const Interval& a, const Interval& b);

// "[a, b)", "(a, b)", ... with exact fractions.
std::string to_string(const Interval& J);

}  // namespace apm
