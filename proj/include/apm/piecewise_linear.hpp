#pragma once

#include <optional>
#include <vector>

#include "apm/interval.hpp"
#include "apm/measure.hpp"
#include "apm/rational.hpp"

namespace apm {

class LimitMeasure;

// Compactly supported continuous piecewise-linear function: linear between
// consecutive breakpoints, zero outside [first, last]. The first and last
// values are zero so the function is continuous on all of R.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn() = default;  // the zero function

  // Throws ConfigError unless breakpoints strictly increase, sizes match,
  // and both end values are zero.
  static PiecewiseLinearFn from_points(std::vector<Rational> xs, std::vector<Rational> ys);

  Rational operator()(const Rational& x) const;

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return ys_; }
  bool is_zero() const { return xs_.empty(); }

  // Closed hull of the breakpoints; [0, 0] for the zero function.
  Interval support() const;
  // Largest absolute slope.
  Rational lipschitz() const;
  // x -> f(x - t).
  PiecewiseLinearFn shifted(const Rational& t) const;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
};

// phi_j for V = [-v, v]: the normalized indicator convolution
// (2v)^{-1} (1_V * 1_{V_{3j}}), i.e. the trapezoid equal to 1 on
// [-(3j-1)v, (3j-1)v] and 0 outside [-(3j+1)v, (3j+1)v].
PiecewiseLinearFn bump(const Rational& v, unsigned j);

// Tent of the given height on [-half_width, half_width], peak at 0.
PiecewiseLinearFn triangle(const Rational& half_width, const Rational& height = 1);

// Default test function: unit tent supported on [-1/6, 1/6].
PiecewiseLinearFn default_test_function();

// Piecewise-linear function known exactly on a bounded domain. Breakpoints
// cover the closure of the domain, including both ends.
struct WindowedFn {
  Interval domain;
  std::vector<Rational> xs;
  std::vector<Rational> ys;

  Rational operator()(const Rational& x) const;
  // x -> g(x - t), domain moved by t.
  WindowedFn shifted(const Rational& t) const;
  // Drops interior breakpoints where the function does not bend.
  WindowedFn canonical() const;
};

WindowedFn on_window(const PiecewiseLinearFn& f, const Interval& J);

// (f * mu)(x) = sum_lambda f(x - lambda) mu(lambda) at a single point.
// Throws WindowError if x - supp f leaves mu's window.
Rational convolution_at(const PiecewiseLinearFn& f, const DiscreteMeasure& mu, const Rational& x);

// f * mu on J, exactly, by sweeping slope changes at lambda + b.
// Throws WindowError naming the x-range where x - supp f leaves mu's window.
WindowedFn convolve(const PiecewiseLinearFn& f, const DiscreteMeasure& mu, const Interval& J);

struct SupWitness {
  Rational value;
  Rational witness;
};

// sup over J of |g|, attained at a breakpoint of the closure of J.
SupWitness sup_abs(const WindowedFn& g, const Interval& J);
// sup over J of |g1 - g2|, evaluated on the merged breakpoints.
SupWitness sup_abs_diff(const WindowedFn& g1, const WindowedFn& g2, const Interval& J);
SupWitness sup_abs_diff(const PiecewiseLinearFn& g1, const PiecewiseLinearFn& g2,
                        const Interval& J);

struct DefectRow {
  Rational tau;
  Rational defect;
  Rational witness;
};

// sup_{x in J} |(f * mu)(x + tau) - (f * mu)(x)|. Needs supp f inside
// [-1/6, 1/6] and mu known on J + tau - supp f and J - supp f.
DefectRow almost_period_defect(const PiecewiseLinearFn& f, const DiscreteMeasure& mu,
                               const Rational& tau, const Interval& J);

struct ApCertificate {
  unsigned s = 0;
  Rational epsilon;
  Rational range;
  Rational gap;  // L = 3^s: every interval of length L holds a candidate tau
  Interval window;
  std::vector<DefectRow> rows;
  Rational max_defect;
  bool pass = false;  // every defect < epsilon
  // Lip(f) * (upper bound on sum_{k > s} r_k) when evaluated on the limit
  // measure; every defect should stay below it.
  std::optional<Rational> predicted_bound;
  bool within_predicted_bound = true;
};

// Defects for tau = p 3^s, |tau| <= R, over J, for a measure that is known on
// every window the shifts touch.
ApCertificate ap_certificate(const PiecewiseLinearFn& f, const DiscreteMeasure& mu,
                             const Rational& epsilon, const Rational& range, unsigned s,
                             const Interval& J);
// Same, evaluated on the limit measure; also fills predicted_bound.
ApCertificate ap_certificate(const PiecewiseLinearFn& f, LimitMeasure& limit,
                             const Rational& epsilon, const Rational& range, unsigned s,
                             const Interval& J);

}  // namespace apm
