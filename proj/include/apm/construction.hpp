#pragma once

// Stage-by-stage construction of a positive, translation bounded, almost
// periodic discrete measure on R whose atom masses tend to zero at infinity:
//
//   mu_0 = delta_0,
//   mu_k = mu_{k-1} + (S_{-3^{k-1}} + S_{3^{k-1}}) T_k mu_{k-1},
//
// with T_k the averaging operator of radius r_k = 2^{-(k+1)^2}. Every atom
// remembers which recursion steps created it, so cluster structure can be
// certified directly instead of reconstructed by search.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "apm/interval.hpp"
#include "apm/measure.hpp"
#include "apm/rational.hpp"

namespace apm {

inline constexpr std::size_t kDefaultAtomCap = 10'000'000;
inline constexpr unsigned kMaxStage = 30;

// r_k = 2^{-(k+1)^2}. Throws ConfigError for k = 0.
Rational radius(unsigned k);

// I_s = ((1 - 3^s)/2 - 1/3, (3^s - 1)/2 + 1/3), open.
Interval stage_interval(unsigned s);

// Closure of I_s; the faithfulness window of mu_s.
Interval stage_window(unsigned s);

// n_s = prod_{k=1..s} (1 + 4k), saturating at SIZE_MAX.
std::size_t projected_atom_count(unsigned s);

// One recursion step that created an atom: at stage `stage` the parent was
// averaged by T_stage (jitter index j in {-k..-1, 1..k}, offset r_k j / k)
// and moved by side * 3^{stage-1}.
struct LineageStep {
  std::uint8_t stage = 0;
  std::int8_t side = 0;
  std::int16_t jitter = 0;

  friend bool operator==(const LineageStep&, const LineageStep&) = default;
};

// mu_s together with the per-atom lineage (strictly increasing stages).
class StageMeasure {
 public:
  unsigned stage() const { return stage_; }
  const DiscreteMeasure& measure() const { return measure_; }
  std::size_t size() const { return measure_.size(); }

  std::span<const LineageStep> lineage(std::size_t atom) const;
  // Stage indices k_j < ... < k_h of the lineage.
  std::vector<unsigned> provenance(std::size_t atom) const;
  // Product of 2k over the provenance.
  Integer provenance_weight(std::size_t atom) const;
  std::optional<std::size_t> index_of(const Rational& position) const;

  // Equal positions produced while assembling this stage (should be zero).
  std::size_t merge_events() const { return merge_events_; }

 private:
  friend StageMeasure build_stage(unsigned, std::size_t);
  friend StageMeasure next_stage_on(const StageMeasure&, const Interval&);

  unsigned stage_ = 0;
  DiscreteMeasure measure_;
  std::vector<LineageStep> steps_;
  std::vector<std::uint32_t> offsets_{0};
  std::size_t merge_events_ = 0;
};

// Builds mu_s with lineage. Throws ResourceError when n_s exceeds atom_cap.
StageMeasure build_stage(unsigned s, std::size_t atom_cap = kDefaultAtomCap);

// Applies one recursion step to prev = mu_{k-1} and keeps only the atoms of
// mu_k inside J (J must lie in the closure of I_k). Work is proportional to
// the output plus a binary search, so windows of large stages stay cheap.
StageMeasure next_stage_on(const StageMeasure& prev, const Interval& J);

// restrict(next, I_prev) equals prev exactly.
bool stage_stable(const StageMeasure& next, const StageMeasure& prev);

// The weak limit mu, evaluated on bounded windows. Stages are built lazily
// and cached.
class LimitMeasure {
 public:
  explicit LimitMeasure(std::size_t atom_cap = kDefaultAtomCap) : atom_cap_(atom_cap) {}

  const StageMeasure& stage(unsigned s);
  // Smallest s with J inside I_s.
  static unsigned stage_for(const Interval& J);

  // mu restricted to J, taken from mu_s with s = stage_for(J) and checked
  // against mu_{s+1} on J. Throws InvariantViolation on disagreement.
  DiscreteMeasure window(const Interval& J);

 private:
  std::size_t atom_cap_;
  std::vector<std::optional<StageMeasure>> stages_;
};

DiscreteMeasure limit_window(const Interval& J, std::size_t atom_cap = kDefaultAtomCap);

// Certificate for sum_{k >= N} r_k < r_{N-1} / (3(N-1)).
struct TailCertificate {
  unsigned first_index = 0;      // N
  unsigned truncation = 0;       // M
  Rational lhs_upper_bound;      // sum_{k=N}^{M} r_k + r_{M+1} / (1 - 2^{-(2M+5)})
  Rational closed_form_bound;    // 2^{-N^2} / (2^{2N} - 1)
  Rational rhs;
  bool holds = false;            // both bounds strictly below rhs
};

// Rigorous upper bound for sum_{k >= N} r_k using the ratio
// r_{k+1} / r_k = 2^{-(2k+3)} <= 2^{-(2M+5)} for k > M. Needs N >= 1, M >= N - 1.
Rational tail_sum_upper_bound(unsigned first_index, unsigned truncation);

TailCertificate verify_tail_estimate(unsigned first_index,
                                     std::optional<unsigned> truncation = std::nullopt);
// sum_{k >= 1} r_k < 1/3.
TailCertificate verify_total_radius_sum(std::optional<unsigned> truncation = std::nullopt);

struct SupportReport {
  bool holds = false;
  std::optional<Atom> witness;  // first atom not strictly inside I_s
};
SupportReport check_support_in_stage_interval(const DiscreteMeasure& mu, unsigned s);
bool verify_support_in_Is(unsigned s);

// Unit mass on every full cell (n - 1/3, n + 1/3) inside I_s, and no atom
// outside the union of cells.
struct CellMassReport {
  bool holds = false;
  std::size_t cells_checked = 0;
  std::optional<long> failing_cell;
  Rational failing_mass;
  std::optional<Atom> stray_atom;
};
CellMassReport check_cell_mass(const DiscreteMeasure& mu, unsigned s);
CellMassReport verify_cell_mass(unsigned s);

struct MassDecayReport {
  unsigned s = 0;
  Interval window;
  std::size_t atoms_outside = 0;
  Rational max_mass_outside;
  std::optional<Rational> argmax;
  Rational bound;  // 1 / (2s)
  bool holds = false;
};
// Largest atom mass of the limit on J at positions outside I_s, against
// 1 / (2s). J must contain the closure of I_s; s >= 1.
MassDecayReport verify_mass_decay(LimitMeasure& limit, unsigned s, const Interval& J);

struct ClusterStep {
  unsigned stage;
  int side;  // +1 or -1
};

struct ClusterCertificate {
  Rational ancestor;    // y
  Rational shift;       // tau = sum side * 3^{stage-1}
  Rational center;      // y + tau
  Integer q;            // prod 2k
  Rational eta;         // sum r_k
  std::vector<Rational> members;
  Rational member_mass;
  bool count_matches = false;       // #members == q
  bool within_eta = false;          // |z - center| <= eta
  bool masses_match = false;        // every member has mass(y) / q
  bool matches_operator = false;    // members == T_{k_h}...T_{k_j} delta_y + tau
  bool images_disjoint = false;     // mu_{s'}, T mu_{s'}, TT mu_{s'}, ... pairwise disjoint
  bool holds() const {
    return count_matches && within_eta && masses_match && matches_operator && images_disjoint;
  }
};

// Certifies that the descendants of ancestor y created by the given steps
// form a cluster of q atoms of mass mu(y)/q within eta of y + tau.
// Throws ConfigError when y is not an atom of the stage, when the steps are
// not strictly increasing stages beyond y's lineage, or exceed the stage.
ClusterCertificate cluster_certificate(const StageMeasure& stage, const Rational& ancestor,
                                       std::span<const ClusterStep> steps);

}  // namespace apm
