#include "apm/piecewise_linear.hpp"

#include <algorithm>

#include "apm/construction.hpp"
#include "apm/errors.hpp"

namespace apm {

namespace {

// Linear interpolation on sorted breakpoints; x must lie in [xs.front(), xs.back()].
Rational interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                     const Rational& x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  if (hi == 0) return ys.front();
  const std::size_t lo = hi - 1;
  if (xs[lo] == x) return ys[lo];
  return ys[lo] + (ys[hi] - ys[lo]) * (x - xs[lo]) / (xs[hi] - xs[lo]);
}

// Sorted, deduplicated points of `extra` strictly inside (lo, hi), framed by lo and hi.
std::vector<Rational> frame(const Rational& lo, const Rational& hi, std::vector<Rational> extra) {
  std::vector<Rational> out{lo};
  std::sort(extra.begin(), extra.end());
  for (auto& x : extra)
    if (x > out.back() && x < hi) out.push_back(std::move(x));
  if (hi > lo) out.push_back(hi);
  return out;
}

}  // namespace

PiecewiseLinearFn PiecewiseLinearFn::from_points(std::vector<Rational> xs,
                                                 std::vector<Rational> ys) {
  if (xs.size() != ys.size()) throw ConfigError("breakpoint and value counts differ");
  for (auto& x : xs) x.canonicalize();
  for (auto& y : ys) y.canonicalize();
  if (xs.size() == 1) throw ConfigError("a single breakpoint cannot carry compact support");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i - 1] < xs[i]))
      throw ConfigError("breakpoints must strictly increase at " + to_string(xs[i]));
  if (!xs.empty() && (ys.front() != 0 || ys.back() != 0))
    throw ConfigError("end values must be zero for a compactly supported continuous function");
  PiecewiseLinearFn f;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

Rational PiecewiseLinearFn::operator()(const Rational& x) const {
  if (xs_.empty() || x <= xs_.front() || x >= xs_.back()) return 0;
  return interpolate(xs_, ys_, x);
}

Interval PiecewiseLinearFn::support() const {
  if (xs_.empty()) return Interval::closed(0, 0);
  return Interval::closed(xs_.front(), xs_.back());
}

Rational PiecewiseLinearFn::lipschitz() const {
  Rational best = 0;
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    Rational slope = abs(Rational((ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1])));
    if (slope > best) best = std::move(slope);
  }
  return best;
}

PiecewiseLinearFn PiecewiseLinearFn::shifted(const Rational& t) const {
  PiecewiseLinearFn g = *this;
  for (auto& x : g.xs_) x += t;
  return g;
}

PiecewiseLinearFn bump(const Rational& v, unsigned j) {
  if (v <= 0) throw ConfigError("bump needs v > 0");
  if (j < 1) throw ConfigError("bump needs j >= 1");
  const Rational inner = v * (3 * j - 1);
  const Rational outer = v * (3 * j + 1);
  return PiecewiseLinearFn::from_points({-outer, -inner, inner, outer}, {0, 1, 1, 0});
}

PiecewiseLinearFn triangle(const Rational& half_width, const Rational& height) {
  if (half_width <= 0) throw ConfigError("triangle needs a positive half-width");
  return PiecewiseLinearFn::from_points({-half_width, 0, half_width}, {0, height, 0});
}

PiecewiseLinearFn default_test_function() { return triangle(Rational(1, 6)); }

Rational WindowedFn::operator()(const Rational& x) const {
  if (!domain.closure().contains(x))
    throw WindowError("evaluation at " + to_string(x) + " outside " + to_string(domain));
  return interpolate(xs, ys, x);
}

WindowedFn WindowedFn::shifted(const Rational& t) const {
  WindowedFn g = *this;
  g.domain = domain.translated(t);
  for (auto& x : g.xs) x += t;
  return g;
}

WindowedFn WindowedFn::canonical() const {
  WindowedFn g{domain, {}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t n = g.xs.size();
    if (n >= 2) {
      // The last kept point is redundant when it lies on the segment from
      // its predecessor to xs[i].
      const Rational left = (g.ys[n - 1] - g.ys[n - 2]) / (g.xs[n - 1] - g.xs[n - 2]);
      const Rational right = (ys[i] - g.ys[n - 1]) / (xs[i] - g.xs[n - 1]);
      if (left == right) {
        g.xs.back() = xs[i];
        g.ys.back() = ys[i];
        continue;
      }
    }
    g.xs.push_back(xs[i]);
    g.ys.push_back(ys[i]);
  }
  return g;
}

WindowedFn on_window(const PiecewiseLinearFn& f, const Interval& J) {
  WindowedFn g{J, frame(J.lo, J.hi, f.breakpoints()), {}};
  for (const auto& x : g.xs) g.ys.push_back(f(x));
  return g;
}

namespace {

void check_reach(const PiecewiseLinearFn& f, const DiscreteMeasure& mu, const Interval& J) {
  const Interval supp = f.support();
  const Interval needed = Interval::closed(J.lo - supp.hi, J.hi - supp.lo);
  if (needed.subset_of(mu.window())) return;
  const Interval& w = mu.window();
  std::string range;
  if (needed.lo < w.lo || (needed.lo == w.lo && w.lo_open))
    range = "x near the left end, x < " + to_string(w.lo + supp.hi);
  else
    range = "x near the right end, x > " + to_string(w.hi + supp.lo);
  throw WindowError("convolution on " + to_string(J) + " needs the measure on " +
                    to_string(needed) + " but it is known only on " + to_string(w) + " (" +
                    range + ")");
}

}  // namespace

Rational convolution_at(const PiecewiseLinearFn& f, const DiscreteMeasure& mu, const Rational& x) {
  check_reach(f, mu, Interval::closed(x, x));
  const Interval supp = f.support();
  Rational sum = 0;
  for (const auto& a : mu.atoms_in(Interval::closed(x - supp.hi, x - supp.lo)))
    sum += f(x - a.position) * a.mass;
  return sum;
}

WindowedFn convolve(const PiecewiseLinearFn& f, const DiscreteMeasure& mu, const Interval& J) {
  check_reach(f, mu, J);
  WindowedFn g{J, {}, {}};
  if (f.is_zero()) {
    g.xs = frame(J.lo, J.hi, {});
    g.ys.assign(g.xs.size(), Rational(0));
    return g;
  }
  const auto& bx = f.breakpoints();
  const auto& by = f.values();
  // Slope change of f at each breakpoint.
  std::vector<Rational> bend(bx.size());
  Rational prev_slope = 0;
  for (std::size_t i = 0; i < bx.size(); ++i) {
    Rational next_slope = 0;
    if (i + 1 < bx.size()) next_slope = (by[i + 1] - by[i]) / (bx[i + 1] - bx[i]);
    bend[i] = next_slope - prev_slope;
    prev_slope = std::move(next_slope);
  }

  const Interval supp = f.support();
  struct Event {
    Rational at;
    Rational bend;
  };
  std::vector<Event> events;
  for (const auto& a : mu.atoms_in(Interval::closed(J.lo - supp.hi, J.hi - supp.lo)))
    for (std::size_t i = 0; i < bx.size(); ++i)
      if (bend[i] != 0) events.push_back({a.position + bx[i], bend[i] * a.mass});
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.at < b.at; });

  Rational value = convolution_at(f, mu, J.lo);
  Rational slope = 0;
  std::size_t e = 0;
  for (; e < events.size() && events[e].at <= J.lo; ++e) slope += events[e].bend;
  Rational x = J.lo;
  g.xs.push_back(x);
  g.ys.push_back(value);
  while (e < events.size() && events[e].at < J.hi) {
    const Rational at = events[e].at;
    value += slope * (at - x);
    x = at;
    for (; e < events.size() && events[e].at == at; ++e) slope += events[e].bend;
    g.xs.push_back(x);
    g.ys.push_back(value);
  }
  if (J.hi > J.lo) {
    value += slope * (J.hi - x);
    g.xs.push_back(J.hi);
    g.ys.push_back(value);
  }
  return g;
}

SupWitness sup_abs(const WindowedFn& g, const Interval& J) {
  WindowedFn zero{J, {J.lo, J.hi}, {0, 0}};
  return sup_abs_diff(g, zero, J);
}

SupWitness sup_abs_diff(const WindowedFn& g1, const WindowedFn& g2, const Interval& J) {
  if (!J.subset_of(g1.domain.closure()) || !J.subset_of(g2.domain.closure()))
    throw WindowError("sup over " + to_string(J) + " leaves a function's domain");
  std::vector<Rational> pts = g1.xs;
  pts.insert(pts.end(), g2.xs.begin(), g2.xs.end());
  SupWitness best{-1, J.lo};
  for (const auto& x : frame(J.lo, J.hi, std::move(pts))) {
    Rational d = abs(Rational(g1(x) - g2(x)));
    if (d > best.value) best = {std::move(d), x};
  }
  return best;
}

SupWitness sup_abs_diff(const PiecewiseLinearFn& g1, const PiecewiseLinearFn& g2,
                        const Interval& J) {
  return sup_abs_diff(on_window(g1, J), on_window(g2, J), J);
}

DefectRow almost_period_defect(const PiecewiseLinearFn& f, const DiscreteMeasure& mu,
                               const Rational& tau, const Interval& J) {
  if (!f.support().subset_of(Interval::closed(Rational(-1, 6), Rational(1, 6))))
    throw ConfigError("test function support " + to_string(f.support()) +
                      " exceeds [-1/6, 1/6]");
  const WindowedFn moved = convolve(f, mu, J.translated(tau)).shifted(-tau);
  const WindowedFn here = convolve(f, mu, J);
  const SupWitness sup = sup_abs_diff(moved, here, J);
  return {tau, sup.value, sup.witness};
}

namespace {

long max_multiplier(const Rational& range, const Rational& period) {
  Integer p;
  const Rational ratio = range / period;
  mpz_fdiv_q(p.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  return p.get_si();
}

}  // namespace

ApCertificate ap_certificate(const PiecewiseLinearFn& f, const DiscreteMeasure& mu,
                             const Rational& epsilon, const Rational& range, unsigned s,
                             const Interval& J) {
  if (s < 1) throw ConfigError("almost-period certificate needs s >= 1");
  if (range < 0) throw ConfigError("range must be non-negative");
  ApCertificate cert;
  cert.s = s;
  cert.epsilon = epsilon;
  cert.range = range;
  cert.gap = pow3(s);
  cert.window = J;
  cert.max_defect = 0;
  const long p_max = max_multiplier(range, cert.gap);
  for (long p = -p_max; p <= p_max; ++p) {
    DefectRow row = almost_period_defect(f, mu, cert.gap * p, J);
    if (row.defect > cert.max_defect) cert.max_defect = row.defect;
    cert.rows.push_back(std::move(row));
  }
  cert.pass = std::all_of(cert.rows.begin(), cert.rows.end(),
                          [&](const DefectRow& r) { return r.defect < epsilon; });
  return cert;
}

ApCertificate ap_certificate(const PiecewiseLinearFn& f, LimitMeasure& limit,
                             const Rational& epsilon, const Rational& range, unsigned s,
                             const Interval& J) {
  if (s < 1) throw ConfigError("almost-period certificate needs s >= 1");
  const Rational reach = pow3(s) * max_multiplier(range, pow3(s));
  const Interval supp = f.support();
  const DiscreteMeasure mu =
      limit.window(Interval::closed(J.lo - reach - supp.hi, J.hi + reach - supp.lo));
  ApCertificate cert = ap_certificate(f, mu, epsilon, range, s, J);
  cert.predicted_bound = f.lipschitz() * tail_sum_upper_bound(s + 1, s + 9);
  cert.within_predicted_bound = cert.max_defect <= *cert.predicted_bound;
  return cert;
}

}  // namespace apm
