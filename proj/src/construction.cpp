#include "apm/construction.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "apm/errors.hpp"

namespace apm {

Rational radius(unsigned k) { return averaging_radius(k); }

Interval stage_interval(unsigned s) {
  const Rational half = (pow3(s) - 1) / 2 + Rational(1, 3);
  return Interval::open(-half, half);
}

Interval stage_window(unsigned s) { return stage_interval(s).closure(); }

std::size_t projected_atom_count(unsigned s) {
  std::size_t n = 1;
  for (unsigned k = 1; k <= s; ++k) {
    const std::size_t factor = 1 + 4 * static_cast<std::size_t>(k);
    if (n > std::numeric_limits<std::size_t>::max() / factor)
      return std::numeric_limits<std::size_t>::max();
    n *= factor;
  }
  return n;
}

std::span<const LineageStep> StageMeasure::lineage(std::size_t atom) const {
  return {steps_.data() + offsets_.at(atom), steps_.data() + offsets_.at(atom + 1)};
}

std::vector<unsigned> StageMeasure::provenance(std::size_t atom) const {
  std::vector<unsigned> out;
  for (const auto& step : lineage(atom)) out.push_back(step.stage);
  return out;
}

Integer StageMeasure::provenance_weight(std::size_t atom) const {
  Integer q = 1;
  for (const auto& step : lineage(atom)) q *= 2 * static_cast<unsigned long>(step.stage);
  return q;
}

std::optional<std::size_t> StageMeasure::index_of(const Rational& position) const {
  const auto& atoms = measure_.atoms();
  auto it = std::lower_bound(atoms.begin(), atoms.end(), position,
                             [](const Atom& a, const Rational& v) { return a.position < v; });
  if (it == atoms.end() || it->position != position) return std::nullopt;
  return static_cast<std::size_t>(it - atoms.begin());
}

StageMeasure next_stage_on(const StageMeasure& prev, const Interval& J) {
  const unsigned k = prev.stage_ + 1;
  if (k > kMaxStage) throw ConfigError("stage index beyond supported maximum");
  if (prev.measure_.window() != stage_window(prev.stage_))
    throw ConfigError("next_stage_on needs the complete previous stage");
  if (!J.subset_of(stage_window(k)))
    throw WindowError("window " + to_string(J) + " is not inside the closure of I_" +
                      std::to_string(k));

  const Rational r = radius(k);
  const Rational lattice = pow3(k - 1);
  const Rational weight(1, 2 * static_cast<unsigned long>(k));
  const Rational step = r / k;

  std::vector<long> jitters;
  for (long j = -static_cast<long>(k); j <= static_cast<long>(k); ++j)
    if (j != 0) jitters.push_back(j);

  const auto& parents = prev.measure_.atoms();
  std::vector<Atom> atoms;
  std::vector<LineageStep> steps;
  std::vector<std::uint32_t> offsets{0};

  auto append = [&](Rational pos, Rational mass, std::size_t parent,
                    std::optional<LineageStep> extra) {
    atoms.push_back({std::move(pos), std::move(mass)});
    const auto inherited = prev.lineage(parent);
    steps.insert(steps.end(), inherited.begin(), inherited.end());
    if (extra) steps.push_back(*extra);
    offsets.push_back(static_cast<std::uint32_t>(steps.size()));
  };

  auto copies = [&](int side) {
    const Rational base = side * lattice;
    std::vector<Rational> moves;
    for (long j : jitters) moves.push_back(base + step * j);
    const Interval reach = J.widened(r).translated(-base);
    const auto span = prev.measure_.atoms_in(reach);
    const std::size_t first = static_cast<std::size_t>(span.data() - parents.data());
    for (std::size_t i = first; i < first + span.size(); ++i) {
      const Rational mass = parents[i].mass * weight;
      for (std::size_t m = 0; m < jitters.size(); ++m) {
        Rational pos = parents[i].position + moves[m];
        if (!J.contains(pos)) continue;
        append(std::move(pos), mass, i,
               LineageStep{static_cast<std::uint8_t>(k), static_cast<std::int8_t>(side),
                           static_cast<std::int16_t>(jitters[m])});
      }
    }
  };

  copies(-1);
  {
    const auto span = prev.measure_.atoms_in(J);
    const std::size_t first = static_cast<std::size_t>(span.data() - parents.data());
    for (std::size_t i = first; i < first + span.size(); ++i)
      append(parents[i].position, parents[i].mass, i, std::nullopt);
  }
  copies(+1);

  const auto by_position = [&](std::size_t a, std::size_t b) {
    return atoms[a].position < atoms[b].position;
  };
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!std::is_sorted(order.begin(), order.end(), by_position))
    std::stable_sort(order.begin(), order.end(), by_position);

  StageMeasure out;
  out.stage_ = k;
  out.merge_events_ = prev.merge_events_;
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  out.steps_.reserve(steps.size());
  out.offsets_.reserve(atoms.size() + 1);
  for (std::size_t idx : order) {
    if (!merged.empty() && merged.back().position == atoms[idx].position) {
      // Disjointness failure: keep the first lineage, sum the masses.
      merged.back().mass += atoms[idx].mass;
      ++out.merge_events_;
      continue;
    }
    merged.push_back(std::move(atoms[idx]));
    out.steps_.insert(out.steps_.end(), steps.begin() + offsets[idx],
                      steps.begin() + offsets[idx + 1]);
    out.offsets_.push_back(static_cast<std::uint32_t>(out.steps_.size()));
  }
  out.measure_ = DiscreteMeasure::from_canonical(std::move(merged), J);
  return out;
}

StageMeasure build_stage(unsigned s, std::size_t atom_cap) {
  if (s > kMaxStage) throw ConfigError("stage index beyond supported maximum");
  const std::size_t projected = projected_atom_count(s);
  if (projected > atom_cap)
    throw ResourceError("stage " + std::to_string(s) + " needs " + std::to_string(projected) +
                        " atoms, above the cap of " + std::to_string(atom_cap));
  StageMeasure cur;
  cur.stage_ = 0;
  cur.measure_ = DiscreteMeasure::from_canonical({Atom{0, 1}}, stage_window(0));
  cur.offsets_ = {0, 0};
  for (unsigned k = 1; k <= s; ++k) cur = next_stage_on(cur, stage_window(k));
  return cur;
}

bool stage_stable(const StageMeasure& next, const StageMeasure& prev) {
  const auto inner = next.measure().atoms_in(stage_interval(prev.stage()));
  const auto& expected = prev.measure().atoms();
  return std::equal(inner.begin(), inner.end(), expected.begin(), expected.end());
}

const StageMeasure& LimitMeasure::stage(unsigned s) {
  if (stages_.size() <= s) stages_.resize(s + 1);
  if (!stages_[s]) {
    // Reuse the largest cached stage below s.
    unsigned from = s;
    while (from > 0 && !stages_[from - 1]) --from;
    if (from == 0) {
      stages_[0] = build_stage(0, atom_cap_);
      from = 1;
    }
    for (unsigned k = from; k <= s; ++k) {
      if (projected_atom_count(k) > atom_cap_)
        throw ResourceError("stage " + std::to_string(k) + " needs " +
                            std::to_string(projected_atom_count(k)) +
                            " atoms, above the cap of " + std::to_string(atom_cap_));
      stages_[k] = next_stage_on(*stages_[k - 1], stage_window(k));
    }
  }
  return *stages_[s];
}

unsigned LimitMeasure::stage_for(const Interval& J) {
  unsigned s = 0;
  while (!J.subset_of(stage_interval(s))) {
    if (++s > kMaxStage) throw ConfigError("window " + to_string(J) + " is too large");
  }
  return s;
}

DiscreteMeasure LimitMeasure::window(const Interval& J) {
  const unsigned s = stage_for(J);
  const StageMeasure& base = stage(s);
  DiscreteMeasure out = restrict(base.measure(), J);
  if (s + 1 <= kMaxStage) {
    const StageMeasure next = next_stage_on(base, J);
    if (next.measure().atoms() != out.atoms())
      throw InvariantViolation("stage " + std::to_string(s + 1) + " disagrees with stage " +
                               std::to_string(s) + " on " + to_string(J));
  }
  return out;
}

DiscreteMeasure limit_window(const Interval& J, std::size_t atom_cap) {
  LimitMeasure limit(atom_cap);
  return limit.window(J);
}

Rational tail_sum_upper_bound(unsigned first_index, unsigned truncation) {
  if (first_index < 1) throw ConfigError("tail sum starts at k >= 1");
  if (truncation + 1 < first_index) throw ConfigError("truncation M must be >= N - 1");
  Rational sum = 0;
  for (unsigned k = first_index; k <= truncation; ++k) sum += radius(k);
  const long ratio_exp = 2 * static_cast<long>(truncation) + 5;
  sum += radius(truncation + 1) / (1 - pow2(-ratio_exp));
  return sum;
}

namespace {

TailCertificate tail_certificate(unsigned n, unsigned m, const Rational& rhs) {
  TailCertificate cert;
  cert.first_index = n;
  cert.truncation = m;
  cert.lhs_upper_bound = tail_sum_upper_bound(n, m);
  const long nn = static_cast<long>(n);
  cert.closed_form_bound = pow2(-nn * nn) / (pow2(2 * nn) - 1);
  cert.rhs = rhs;
  cert.holds = cert.lhs_upper_bound < rhs && cert.closed_form_bound < rhs;
  return cert;
}

}  // namespace

TailCertificate verify_tail_estimate(unsigned first_index, std::optional<unsigned> truncation) {
  if (first_index < 2) throw ConfigError("tail estimate needs N >= 2");
  const unsigned m = truncation.value_or(first_index + 8);
  return tail_certificate(first_index, m, radius(first_index - 1) / (3 * (first_index - 1)));
}

TailCertificate verify_total_radius_sum(std::optional<unsigned> truncation) {
  return tail_certificate(1, truncation.value_or(9), Rational(1, 3));
}

SupportReport check_support_in_stage_interval(const DiscreteMeasure& mu, unsigned s) {
  const Interval I = stage_interval(s);
  for (const auto& a : mu.atoms())
    if (!I.contains(a.position)) return {false, a};
  return {true, std::nullopt};
}

bool verify_support_in_Is(unsigned s) {
  return check_support_in_stage_interval(build_stage(s).measure(), s).holds;
}

CellMassReport check_cell_mass(const DiscreteMeasure& mu, unsigned s) {
  CellMassReport report;
  const Rational third(1, 3);
  for (const auto& a : mu.atoms()) {
    // Nearest integer n; the atom must lie in the open cell around it.
    Integer n;
    mpz_fdiv_q(n.get_mpz_t(), Rational(a.position + Rational(1, 2)).get_num_mpz_t(),
               Rational(a.position + Rational(1, 2)).get_den_mpz_t());
    if (!(abs(a.position - Rational(n)) < third)) {
      report.stray_atom = a;
      break;
    }
  }
  const long reach = Rational((pow3(s) - 1) / 2).get_num().get_si();
  for (long n = -reach; n <= reach; ++n) {
    const Interval cell = Interval::open(Rational(n) - third, Rational(n) + third);
    Rational mass = 0;
    for (const auto& a : mu.atoms_in(cell)) mass += a.mass;
    ++report.cells_checked;
    if (mass != 1 && !report.failing_cell) {
      report.failing_cell = n;
      report.failing_mass = mass;
    }
  }
  report.holds = !report.failing_cell && !report.stray_atom;
  return report;
}

CellMassReport verify_cell_mass(unsigned s) { return check_cell_mass(build_stage(s).measure(), s); }

MassDecayReport verify_mass_decay(LimitMeasure& limit, unsigned s, const Interval& J) {
  if (s == 0) throw ConfigError("mass decay bound 1/(2s) needs s >= 1");
  if (!stage_window(s).subset_of(J))
    throw ConfigError("mass decay window " + to_string(J) + " must contain the closure of I_" +
                      std::to_string(s));
  MassDecayReport report;
  report.s = s;
  report.window = J;
  report.bound = Rational(1, 2 * static_cast<unsigned long>(s));
  const Interval inner = stage_interval(s);
  const DiscreteMeasure mu = limit.window(J);
  for (const auto& a : mu.atoms()) {
    if (inner.contains(a.position)) continue;
    ++report.atoms_outside;
    if (!report.argmax || a.mass > report.max_mass_outside) {
      report.max_mass_outside = a.mass;
      report.argmax = a.position;
    }
  }
  report.holds = report.max_mass_outside < report.bound;
  return report;
}

ClusterCertificate cluster_certificate(const StageMeasure& stage, const Rational& ancestor,
                                       std::span<const ClusterStep> steps) {
  const auto idx = stage.index_of(ancestor);
  if (!idx) throw ConfigError(to_string(ancestor) + " is not an atom of stage " +
                              std::to_string(stage.stage()));
  const auto root = stage.lineage(*idx);
  unsigned last = root.empty() ? 0 : root.back().stage;
  for (const auto& st : steps) {
    if (st.stage <= last || st.stage > stage.stage() || (st.side != 1 && st.side != -1))
      throw ConfigError("cluster steps must be strictly increasing stages in (" +
                        std::to_string(root.empty() ? 0 : root.back().stage) + ", " +
                        std::to_string(stage.stage()) + "] with side +-1");
    last = st.stage;
  }

  ClusterCertificate cert;
  cert.ancestor = ancestor;
  cert.shift = 0;
  cert.eta = 0;
  cert.q = 1;
  for (const auto& st : steps) {
    cert.shift += st.side * pow3(st.stage - 1);
    cert.eta += radius(st.stage);
    cert.q *= 2 * static_cast<unsigned long>(st.stage);
  }
  cert.center = ancestor + cert.shift;
  const Rational ancestor_mass = stage.measure().atoms()[*idx].mass;
  cert.member_mass = ancestor_mass / Rational(cert.q);

  const Interval ball = Interval::closed(cert.center - cert.eta, cert.center + cert.eta);
  if (!ball.subset_of(stage.measure().window()))
    throw WindowError("cluster around " + to_string(cert.center) + " leaves the stage window");
  const auto members = stage.measure().atoms_in(ball);
  const std::size_t first =
      static_cast<std::size_t>(members.data() - stage.measure().atoms().data());
  bool lineage_ok = true;
  cert.masses_match = true;
  for (std::size_t i = first; i < first + members.size(); ++i) {
    const auto& atom = stage.measure().atoms()[i];
    cert.members.push_back(atom.position);
    if (atom.mass != cert.member_mass) cert.masses_match = false;
    const auto lin = stage.lineage(i);
    if (lin.size() != root.size() + steps.size() || !std::equal(root.begin(), root.end(), lin.begin())) {
      lineage_ok = false;
      continue;
    }
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto& got = lin[root.size() + t];
      if (got.stage != steps[t].stage || got.side != steps[t].side) lineage_ok = false;
    }
  }
  cert.count_matches = Integer(cert.members.size()) == cert.q;

  // Independent route: push delta_y through the averaging operators.
  DiscreteMeasure image = DiscreteMeasure::from_canonical(
      {Atom{ancestor, ancestor_mass}}, Interval::closed(ancestor, ancestor));
  for (const auto& st : steps) image = averaging_operator(image, st.stage);
  image = shift(image, cert.shift);
  cert.within_eta = true;
  for (const auto& a : image.atoms())
    if (abs(a.position - cert.center) > cert.eta) cert.within_eta = false;
  cert.matches_operator = lineage_ok && image.size() == members.size() &&
                          std::equal(members.begin(), members.end(), image.atoms().begin());

  cert.images_disjoint = true;
  if (!steps.empty()) {
    const unsigned base_stage = steps.front().stage - 1;
    if (stage.measure().window() != stage_window(stage.stage()))
      throw ConfigError("disjointness check needs a complete stage measure");
    DiscreteMeasure img = restrict(stage.measure(), stage_window(base_stage));
    std::vector<Rational> all;
    for (const auto& a : img.atoms()) all.push_back(a.position);
    for (const auto& st : steps) {
      const std::size_t expected = img.size() * 2 * st.stage;
      img = averaging_operator(img, st.stage);
      if (img.size() != expected) cert.images_disjoint = false;
      for (const auto& a : img.atoms()) all.push_back(a.position);
    }
    std::sort(all.begin(), all.end());
    cert.images_disjoint =
        cert.images_disjoint && std::adjacent_find(all.begin(), all.end()) == all.end();
  }
  return cert;
}

}  // namespace apm
