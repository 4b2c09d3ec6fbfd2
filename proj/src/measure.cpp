#include "apm/measure.hpp"

#include <algorithm>

#include "apm/errors.hpp"

namespace apm {

namespace {

void check_canonical(const std::vector<Atom>& atoms, const Interval& window) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].mass == 0)
      throw InvariantViolation("zero-mass atom at " + to_string(atoms[i].position));
    if (!window.contains(atoms[i].position))
      throw InvariantViolation("atom at " + to_string(atoms[i].position) + " outside window " +
                               to_string(window));
    if (i > 0 && !(atoms[i - 1].position < atoms[i].position))
      throw InvariantViolation("atom positions not strictly increasing at " +
                               to_string(atoms[i].position));
  }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure() : window_(Interval::closed(0, 0)) {}

DiscreteMeasure DiscreteMeasure::from_canonical(std::vector<Atom> atoms, Interval window) {
  check_canonical(atoms, window);
  return DiscreteMeasure(std::move(atoms), std::move(window));
}

Rational DiscreteMeasure::mass_at(const Rational& x) const {
  if (!window_.contains(x))
    throw WindowError("mass requested at " + to_string(x) + " outside window " + to_string(window_));
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, const Rational& v) { return a.position < v; });
  if (it != atoms_.end() && it->position == x) return it->mass;
  return 0;
}

Rational DiscreteMeasure::total_mass() const {
  Rational sum = 0;
  for (const auto& a : atoms_) sum += a.mass;
  return sum;
}

std::span<const Atom> DiscreteMeasure::atoms_in(const Interval& J) const {
  auto first = std::partition_point(atoms_.begin(), atoms_.end(), [&](const Atom& a) {
    return J.lo_open ? a.position <= J.lo : a.position < J.lo;
  });
  auto last = std::partition_point(first, atoms_.end(), [&](const Atom& a) {
    return J.hi_open ? a.position < J.hi : a.position <= J.hi;
  });
  return {std::to_address(first), static_cast<std::size_t>(last - first)};
}

std::size_t canonicalize(std::vector<Atom>& atoms) {
  auto by_position = [](const Atom& a, const Atom& b) { return a.position < b.position; };
  if (!std::is_sorted(atoms.begin(), atoms.end(), by_position))
    std::stable_sort(atoms.begin(), atoms.end(), by_position);
  std::size_t merges = 0;
  std::size_t out = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (out > 0 && atoms[out - 1].position == atoms[i].position) {
      atoms[out - 1].mass += atoms[i].mass;
      ++merges;
    } else {
      if (out != i) atoms[out] = std::move(atoms[i]);
      ++out;
    }
  }
  atoms.resize(out);
  std::erase_if(atoms, [](const Atom& a) { return a.mass == 0; });
  return merges;
}

DiscreteMeasure make_measure(std::vector<Atom> atoms, const Interval& window) {
  for (auto& a : atoms) {
    a.position.canonicalize();
    a.mass.canonicalize();
  }
  for (const auto& a : atoms)
    if (!window.contains(a.position))
      throw WindowError("atom (" + to_string(a.position) + ", " + to_string(a.mass) +
                        ") outside window " + to_string(window));
  canonicalize(atoms);
  return DiscreteMeasure::from_canonical(std::move(atoms), window);
}

DiscreteMeasure shift(const DiscreteMeasure& mu, const Rational& t) {
  std::vector<Atom> atoms = mu.atoms();
  for (auto& a : atoms) a.position += t;
  return DiscreteMeasure::from_canonical(std::move(atoms), mu.window().translated(t));
}

Rational averaging_radius(unsigned k) {
  if (k == 0) throw ConfigError("averaging radius r_k needs k >= 1");
  const long e = static_cast<long>(k) + 1;
  return pow2(-e * e);
}

DiscreteMeasure averaging_operator(const DiscreteMeasure& mu, unsigned k) {
  if (k == 0) throw ConfigError("averaging operator T_k needs k >= 1");
  const Rational r = averaging_radius(k);
  const Rational step = r / k;
  const Rational weight = Rational(1, 2 * k);
  std::vector<Atom> atoms;
  atoms.reserve(mu.size() * 2 * k);
  for (const auto& a : mu.atoms()) {
    const Rational m = a.mass * weight;
    for (long j = -static_cast<long>(k); j <= static_cast<long>(k); ++j) {
      if (j == 0) continue;
      atoms.push_back({a.position + step * j, m});
    }
  }
  return make_measure(std::move(atoms), mu.window().widened(r));
}

DiscreteMeasure combine(const Rational& c1, const DiscreteMeasure& mu, const Rational& c2,
                        const DiscreteMeasure& nu) {
  auto common = intersect(mu.window(), nu.window());
  if (!common)
    throw WindowError("combine: windows " + to_string(mu.window()) + " and " +
                      to_string(nu.window()) + " are disjoint");
  std::vector<Atom> atoms;
  if (c1 != 0)
    for (const auto& a : mu.atoms_in(*common)) atoms.push_back({a.position, c1 * a.mass});
  if (c2 != 0)
    for (const auto& a : nu.atoms_in(*common)) atoms.push_back({a.position, c2 * a.mass});
  canonicalize(atoms);
  return DiscreteMeasure::from_canonical(std::move(atoms), *common);
}

DiscreteMeasure scale(const DiscreteMeasure& mu, const Rational& c) {
  return combine(c, mu, 0, mu);
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const Interval& J) {
  if (!J.subset_of(mu.window()))
    throw WindowError("restriction to " + to_string(J) + " leaves the window " +
                      to_string(mu.window()));
  const auto span = mu.atoms_in(J);
  return DiscreteMeasure::from_canonical(std::vector<Atom>(span.begin(), span.end()), J);
}

Rational variation_on(const DiscreteMeasure& mu, const Interval& J) {
  if (!J.subset_of(mu.window()))
    throw WindowError("variation on " + to_string(J) + " leaves the window " +
                      to_string(mu.window()));
  Rational sum = 0;
  for (const auto& a : mu.atoms_in(J)) sum += abs(a.mass);
  return sum;
}

VariationSup sliding_variation_sup(const DiscreteMeasure& mu, const Rational& length) {
  if (length <= 0) throw ConfigError("sliding variation needs L > 0");
  const Interval& w = mu.window();
  if (w.length() < length)
    throw ConfigError("window " + to_string(w) + " is shorter than L = " + to_string(length));
  const auto& atoms = mu.atoms();
  // prefix[i] = |mu| of the first i atoms.
  std::vector<Rational> prefix(atoms.size() + 1, Rational(0));
  for (std::size_t i = 0; i < atoms.size(); ++i) prefix[i + 1] = prefix[i] + abs(atoms[i].mass);

  VariationSup best{0, w.lo};
  const Rational last_start = w.hi - length;
  std::size_t end = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Rational t = std::min(atoms[i].position, last_start);
    if (t < w.lo) t = w.lo;
    const Rational right = t + length;
    std::size_t begin = static_cast<std::size_t>(
        std::partition_point(atoms.begin(), atoms.end(),
                             [&](const Atom& a) { return a.position < t; }) -
        atoms.begin());
    if (end < begin) end = begin;
    while (end < atoms.size() && atoms[end].position <= right) ++end;
    const Rational value = prefix[end] - prefix[begin];
    if (value > best.value) best = {value, t};
  }
  return best;
}

CountSup sliding_count_sup(const DiscreteMeasure& mu, const Rational& half_width) {
  if (half_width <= 0) throw ConfigError("sliding count needs u > 0");
  const auto& atoms = mu.atoms();
  CountSup best{0, mu.window().lo};
  const Rational width = 2 * half_width;
  std::size_t j = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (j < i) j = i;
    while (j + 1 < atoms.size() && atoms[j + 1].position - atoms[i].position < width) ++j;
    const std::size_t count = j - i + 1;
    if (count > best.count) best = {count, (atoms[i].position + atoms[j].position) / 2};
  }
  return best;
}

Rational min_gap(const DiscreteMeasure& mu) {
  const auto& atoms = mu.atoms();
  if (atoms.size() < 2) return 0;
  Rational gap = atoms[1].position - atoms[0].position;
  for (std::size_t i = 2; i < atoms.size(); ++i) {
    Rational d = atoms[i].position - atoms[i - 1].position;
    if (d < gap) gap = std::move(d);
  }
  return gap;
}

bool equal_on_common_window(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  auto common = intersect(a.window(), b.window());
  if (!common) return true;
  const auto sa = a.atoms_in(*common);
  const auto sb = b.atoms_in(*common);
  return std::equal(sa.begin(), sa.end(), sb.begin(), sb.end());
}

}  // namespace apm
