#pragma once

// Finite-window machinery behind the uniqueness results for discrete almost
// periodic measures: sparsity bounds, close-at-infinity matchings, lumps,
// and the product Psi(x) = prod_{j=1..N} ((mu - nu) * phi_j)(x).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "apm/interval.hpp"
#include "apm/measure.hpp"
#include "apm/rational.hpp"

namespace apm {

// 1 + max of the sliding counts of mu and nu for U = (-u, u), so that
// #((x + U) ∩ supp) < N for both measures and every x.
unsigned dm_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Rational& u);

struct MatchedPair {
  Atom mu;
  Atom nu;
  Rational delta_position;  // mu.position - nu.position
  Rational delta_mass;      // mu.mass - nu.mass
};

// Largest mismatch among pairs with an endpoint outside K.
struct ShellProfile {
  Interval K;
  std::size_t pairs_outside = 0;
  std::size_t unmatched_outside = 0;
  Rational max_delta_position;  // absolute values
  Rational max_delta_mass;
};

struct MatchReport {
  Interval domain;
  std::vector<MatchedPair> pairs;
  std::vector<Atom> unmatched_mu;
  std::vector<Atom> unmatched_nu;
  std::vector<ShellProfile> profile;
  bool certified_decreasing = false;  // profile non-increasing outward
  bool coincide = false;              // no unmatched atoms and every delta is zero

  // Close-at-infinity certificate on the examined window.
  bool come_close() const {
    return certified_decreasing && unmatched_mu.empty() && unmatched_nu.empty();
  }
};

// Minimum-cost order-preserving matching between the atoms of mu and nu in
// the outermost window (or the common window when none is given). Cost is
// the total |delta position|, ties broken by total |delta mass|, then by
// matching the leftmost candidate first. Windows must be nested and inside
// both measures' windows.
MatchReport match_close(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        std::span<const Interval> nested_windows);

struct Lump {
  std::vector<Atom> mu_atoms;
  std::vector<Atom> nu_atoms;
  Rational lo;
  Rational hi;
  Rational diameter;
  Rational mass_gap;  // |mu(lump) - nu(lump)|
  bool within_v = false;  // all pairwise differences lie in (-v, v)
};

struct LumpDecomposition {
  Rational v;
  Rational u;
  std::vector<Lump> lumps;
  // max_x #{lumps meeting (x - u, x + u)}, with a witness center.
  std::size_t max_lumps_per_window = 0;
  Rational witness;
};

// Single-linkage clustering of supp mu ∪ supp nu on the common window:
// consecutive points closer than v (strictly) share a lump. The sliding
// lump count uses U = (-u, u), u defaulting to v.
LumpDecomposition lump_decompose(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const Rational& v, std::optional<Rational> u = std::nullopt);

// Parameters of the Psi harness. V = [-v, v], U = (-u, u), and the bumps
// phi_1..phi_N must fit inside U: (3N + 2) v <= u.
struct HarnessConfig {
  Rational v;
  unsigned N = 1;
  Rational epsilon;
  Interval K;
  Rational u;

  // Throws ConfigError when an invariant fails.
  void validate() const;
};

// The N factors ((mu - nu) * phi_j)(x), j = 1..N.
std::vector<Rational> psi_factors(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const HarnessConfig& cfg, const Rational& x);
Rational psi(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const HarnessConfig& cfg,
             const Rational& x);

struct ZeroIdentityCertificate {
  Rational difference;  // mu(0) - nu(0)
  Rational psi_at_zero;
  Rational expected;    // difference^N
  bool holds = false;
  bool degenerate = false;  // mu(0) == nu(0)
};

// Psi(0) == (mu(0) - nu(0))^N, after checking that the only atom of either
// measure in (-(3N+2)v, (3N+2)v) sits at 0 (ConfigError names the intruder).
ZeroIdentityCertificate psi_zero_identity(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          const HarnessConfig& cfg);

struct FarFieldSample {
  Rational b;
  Rational psi;
  bool holds = false;  // |psi| < bound
};

struct FarFieldReport {
  Interval examined;  // where C was computed and samples may lie
  unsigned N = 0;
  unsigned dm_required = 0;
  Rational epsilon;
  Rational C;      // max_j sup_examined |(mu - nu) * phi_j|
  Rational bound;  // N eps C^{N-1}
  // Matching hypothesis outside K: |dpos| < v, |dmass| < eps, nothing unmatched.
  bool hypothesis_holds = false;
  Rational max_delta_position_outside;
  Rational max_delta_mass_outside;
  std::vector<FarFieldSample> samples;
  bool pass = false;
};

// Checks |Psi(b)| < N eps C^{N-1} at every sample b outside K + U.
// ConfigError for samples inside K + U or N below dm_bound.
FarFieldReport far_field_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const HarnessConfig& cfg, std::span<const Rational> samples);

// Integer comb sum_{n=first..last} mass * delta_n on the given window.
DiscreteMeasure integer_comb(long first, long last, const Interval& window,
                             const Rational& mass = 1);
// Comb with atom n moved to n + 1/(8(|n| + 1)), unit masses.
DiscreteMeasure perturbed_comb(long first, long last, const Interval& window);

}  // namespace apm
