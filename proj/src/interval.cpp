#include "apm/interval.hpp"

#include "apm/errors.hpp"

namespace apm {

Interval Interval::closed(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw ConfigError("interval with lo > hi: " + to_string(lo) + " > " + to_string(hi));
  Interval J{lo, hi, false, false};
  J.lo.canonicalize();
  J.hi.canonicalize();
  return J;
}

Interval Interval::open(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw ConfigError("interval with lo > hi: " + to_string(lo) + " > " + to_string(hi));
  Interval J{lo, hi, true, true};
  J.lo.canonicalize();
  J.hi.canonicalize();
  return J;
}

Interval Interval::symmetric(const Rational& r, bool open_ends) {
  return open_ends ? open(-r, r) : closed(-r, r);
}

bool Interval::contains(const Rational& x) const {
  const bool above = lo_open ? x > lo : x >= lo;
  const bool below = hi_open ? x < hi : x <= hi;
  return above && below;
}

bool Interval::empty() const {
  return lo == hi && (lo_open || hi_open);
}

bool Interval::subset_of(const Interval& other) const {
  if (empty()) return true;
  const bool lo_ok = other.lo < lo || (other.lo == lo && (!other.lo_open || lo_open));
  const bool hi_ok = hi < other.hi || (hi == other.hi && (!other.hi_open || hi_open));
  return lo_ok && hi_ok;
}

Interval Interval::translated(const Rational& t) const {
  return Interval{lo + t, hi + t, lo_open, hi_open};
}

Interval Interval::widened(const Rational& r, bool open_margin) const {
  if (r < 0) throw ConfigError("negative widening radius");
  if (r == 0) return *this;
  // x + (-r, r) is open at both ends; x + [-r, r] keeps the original flags.
  return Interval{lo - r, hi + r, lo_open || open_margin, hi_open || open_margin};
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Interval out;
  if (a.lo > b.lo) {
    out.lo = a.lo;
    out.lo_open = a.lo_open;
  } else if (b.lo > a.lo) {
    out.lo = b.lo;
    out.lo_open = b.lo_open;
  } else {
    out.lo = a.lo;
    out.lo_open = a.lo_open || b.lo_open;
  }
  if (a.hi < b.hi) {
    out.hi = a.hi;
    out.hi_open = a.hi_open;
  } else if (b.hi < a.hi) {
    out.hi = b.hi;
    out.hi_open = b.hi_open;
  } else {
    out.hi = a.hi;
    out.hi_open = a.hi_open || b.hi_open;
  }
  if (out.lo > out.hi || out.empty()) return std::nullopt;
  return out;
}

std::string to_string(const Interval& J) {
  return std::string(J.lo_open ? "(" : "[") + to_string(J.lo) + ", " + to_string(J.hi) +
         (J.hi_open ? ")" : "]");
}

}  // namespace apm
