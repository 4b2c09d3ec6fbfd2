#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "apm/interval.hpp"
#include "apm/rational.hpp"

namespace apm {

// One term mass * delta_position of a discrete measure.
struct Atom {
  Rational position;
  Rational mass;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Finite discrete measure together with the window on which the atom list is
// the complete, exact restriction of the (possibly infinite) measure it
// represents.
//
// Invariants: positions strictly increasing, no zero masses, every position
// inside window().
class DiscreteMeasure {
 public:
  // Empty measure on the degenerate window [0, 0].
  DiscreteMeasure();

  // Takes atoms already in canonical order; throws InvariantViolation if the
  // invariants do not hold.
  static DiscreteMeasure from_canonical(std::vector<Atom> atoms, Interval window);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Interval& window() const { return window_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  // Mass at x (zero when x is not an atom). x must be inside the window.
  Rational mass_at(const Rational& x) const;
  Rational total_mass() const;

  // Contiguous run of atoms whose positions lie in J (J is not required to
  // be inside the window).
  std::span<const Atom> atoms_in(const Interval& J) const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  DiscreteMeasure(std::vector<Atom> atoms, Interval window)
      : atoms_(std::move(atoms)), window_(std::move(window)) {}

  std::vector<Atom> atoms_;
  Interval window_;
};

// Sorts, merges equal positions by summing masses, and drops zero masses.
// Returns the number of merge events (pairs of atoms that landed on the same
// position).
std::size_t canonicalize(std::vector<Atom>& atoms);

// Builds a canonical measure. Throws WindowError naming the first atom that
// lies outside the window.
DiscreteMeasure make_measure(std::vector<Atom> atoms, const Interval& window);

// S_t: moves every atom (and the window) by t.
DiscreteMeasure shift(const DiscreteMeasure& mu, const Rational& t);

// r_k = 2^{-(k+1)^2}, the jitter radius of the k-th averaging operator.
Rational averaging_radius(unsigned k);

// T_k mu = (1/2k) sum_{j=1..k} (S_{-r_k j/k} + S_{r_k j/k}) mu.
// The window grows by r_k on each side. Throws ConfigError for k = 0.
DiscreteMeasure averaging_operator(const DiscreteMeasure& mu, unsigned k);

// c1*mu + c2*nu on the intersection of the two windows. Throws WindowError
// when the windows are disjoint.
DiscreteMeasure combine(const Rational& c1, const DiscreteMeasure& mu, const Rational& c2,
                        const DiscreteMeasure& nu);
DiscreteMeasure scale(const DiscreteMeasure& mu, const Rational& c);

// Restriction to J; the result's window is J. Throws WindowError unless J is
// inside mu's window.
DiscreteMeasure restrict(const DiscreteMeasure& mu, const Interval& J);

// |mu|(J). Same precondition as restrict.
Rational variation_on(const DiscreteMeasure& mu, const Interval& J);

struct VariationSup {
  Rational value;
  Rational witness;  // left end t of the maximizing [t, t + L]
};

// sup_t |mu|([t, t+L]) over placements inside the window.
// Throws ConfigError for L <= 0 or a window shorter than L.
VariationSup sliding_variation_sup(const DiscreteMeasure& mu, const Rational& length);

struct CountSup {
  std::size_t count = 0;
  Rational witness;  // center x of a maximizing (x - u, x + u)
};

// max_x #{(x - u, x + u) ∩ supp mu}. Throws ConfigError for u <= 0.
CountSup sliding_count_sup(const DiscreteMeasure& mu, const Rational& half_width);

// Smallest distance between consecutive atoms; zero for fewer than two atoms.
Rational min_gap(const DiscreteMeasure& mu);

// Equality of the atom lists restricted to the intersection of the windows.
bool equal_on_common_window(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace apm
