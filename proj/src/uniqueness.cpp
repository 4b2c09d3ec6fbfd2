#include "apm/uniqueness.hpp"

#include <algorithm>

#include "apm/errors.hpp"
#include "apm/piecewise_linear.hpp"

namespace apm {

unsigned dm_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Rational& u) {
  const std::size_t a = sliding_count_sup(mu, u).count;
  const std::size_t b = sliding_count_sup(nu, u).count;
  return static_cast<unsigned>(std::max(a, b) + 1);
}

namespace {

struct Cost {
  Rational position = 0;
  Rational mass = 0;

  bool operator<(const Cost& o) const {
    return position < o.position || (position == o.position && mass < o.mass);
  }
};

constexpr std::size_t kMaxMatchStates = 50'000'000;

}  // namespace

MatchReport match_close(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        std::span<const Interval> nested_windows) {
  for (std::size_t i = 1; i < nested_windows.size(); ++i)
    if (!nested_windows[i - 1].subset_of(nested_windows[i]))
      throw ConfigError("windows must be nested: " + to_string(nested_windows[i - 1]) +
                        " is not inside " + to_string(nested_windows[i]));
  MatchReport report;
  if (nested_windows.empty()) {
    auto common = intersect(mu.window(), nu.window());
    if (!common) throw WindowError("measures have disjoint windows");
    report.domain = *common;
  } else {
    report.domain = nested_windows.back();
    if (!report.domain.subset_of(mu.window()) || !report.domain.subset_of(nu.window()))
      throw WindowError("matching window " + to_string(report.domain) +
                        " is not inside both measure windows");
  }

  const auto mu_atoms = mu.atoms_in(report.domain);
  const auto nu_atoms = nu.atoms_in(report.domain);
  const bool flipped = mu_atoms.size() > nu_atoms.size();
  const auto small = flipped ? nu_atoms : mu_atoms;
  const auto large = flipped ? mu_atoms : nu_atoms;
  const std::size_t n = small.size();
  const std::size_t d = large.size() - n;
  if ((n + 1) * (d + 1) > kMaxMatchStates)
    throw ResourceError("matching needs too many states; narrow the window");

  // cost(i, t): first i atoms of `small` matched, first i + t of `large` used.
  // skip(i, t) records whether large[i + t - 1] was left unmatched.
  std::vector<std::vector<char>> skip(n + 1, std::vector<char>(d + 1, 0));
  std::vector<Cost> prev(d + 1), cur(d + 1);
  for (std::size_t t = 1; t <= d; ++t) skip[0][t] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t t = 0; t <= d; ++t) {
      const Atom& a = small[i - 1];
      const Atom& b = large[i - 1 + t];
      Cost match{prev[t].position + abs(Rational(a.position - b.position)),
                 prev[t].mass + abs(Rational(a.mass - b.mass))};
      if (t > 0 && !(match < cur[t - 1])) {
        cur[t] = cur[t - 1];
        skip[i][t] = 1;
      } else {
        cur[t] = std::move(match);
        skip[i][t] = 0;
      }
    }
    std::swap(prev, cur);
  }

  std::vector<char> used(large.size(), 0);
  std::size_t i = n, t = d;
  while (i > 0 || t > 0) {
    if (skip[i][t]) {
      --t;
      continue;
    }
    const Atom& a = small[i - 1];
    const Atom& b = large[i - 1 + t];
    used[i - 1 + t] = 1;
    const Atom& m = flipped ? b : a;
    const Atom& v = flipped ? a : b;
    report.pairs.push_back({m, v, m.position - v.position, m.mass - v.mass});
    --i;
  }
  std::reverse(report.pairs.begin(), report.pairs.end());
  for (std::size_t j = 0; j < large.size(); ++j)
    if (!used[j]) (flipped ? report.unmatched_mu : report.unmatched_nu).push_back(large[j]);

  for (const auto& K : nested_windows) {
    ShellProfile shell{K, 0, 0, 0, 0};
    for (const auto& p : report.pairs) {
      if (K.contains(p.mu.position) && K.contains(p.nu.position)) continue;
      ++shell.pairs_outside;
      const Rational dp = abs(p.delta_position);
      const Rational dm = abs(p.delta_mass);
      if (dp > shell.max_delta_position) shell.max_delta_position = dp;
      if (dm > shell.max_delta_mass) shell.max_delta_mass = dm;
    }
    for (const auto* list : {&report.unmatched_mu, &report.unmatched_nu})
      for (const auto& a : *list)
        if (!K.contains(a.position)) ++shell.unmatched_outside;
    report.profile.push_back(std::move(shell));
  }
  report.certified_decreasing = true;
  for (std::size_t k = 1; k < report.profile.size(); ++k) {
    const auto& inner = report.profile[k - 1];
    const auto& outer = report.profile[k];
    if (outer.max_delta_position > inner.max_delta_position ||
        outer.max_delta_mass > inner.max_delta_mass)
      report.certified_decreasing = false;
  }
  report.coincide = report.unmatched_mu.empty() && report.unmatched_nu.empty() &&
                    std::all_of(report.pairs.begin(), report.pairs.end(), [](const MatchedPair& p) {
                      return p.delta_position == 0 && p.delta_mass == 0;
                    });
  return report;
}

LumpDecomposition lump_decompose(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const Rational& v, std::optional<Rational> u) {
  if (v <= 0) throw ConfigError("lump linking distance v must be positive");
  auto common = intersect(mu.window(), nu.window());
  if (!common) throw WindowError("measures have disjoint windows");
  LumpDecomposition out;
  out.v = v;
  out.u = u.value_or(v);
  if (out.u <= 0) throw ConfigError("lump window half-width u must be positive");

  struct Point {
    const Atom* atom;
    bool from_mu;
  };
  std::vector<Point> points;
  for (const auto& a : mu.atoms_in(*common)) points.push_back({&a, true});
  for (const auto& a : nu.atoms_in(*common)) points.push_back({&a, false});
  std::stable_sort(points.begin(), points.end(), [](const Point& x, const Point& y) {
    return x.atom->position < y.atom->position;
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Atom& a = *points[i].atom;
    if (i == 0 || !(a.position - points[i - 1].atom->position < v)) {
      Lump lump;
      lump.lo = a.position;
      out.lumps.push_back(std::move(lump));
    }
    Lump& lump = out.lumps.back();
    lump.hi = a.position;
    (points[i].from_mu ? lump.mu_atoms : lump.nu_atoms).push_back(a);
  }
  for (auto& lump : out.lumps) {
    lump.diameter = lump.hi - lump.lo;
    lump.within_v = lump.diameter < v;
    Rational gap = 0;
    for (const auto& a : lump.mu_atoms) gap += a.mass;
    for (const auto& a : lump.nu_atoms) gap -= a.mass;
    lump.mass_gap = abs(gap);
  }

  const Rational width = 2 * out.u;
  out.witness = common->lo;
  std::size_t b = 0;
  for (std::size_t a = 0; a < out.lumps.size(); ++a) {
    if (b < a) b = a;
    while (b + 1 < out.lumps.size() && out.lumps[b + 1].lo - out.lumps[a].hi < width) ++b;
    if (b - a + 1 > out.max_lumps_per_window) {
      out.max_lumps_per_window = b - a + 1;
      out.witness = (out.lumps[a].hi + out.lumps[b].lo) / 2;
    }
  }
  return out;
}

void HarnessConfig::validate() const {
  if (N < 1) throw ConfigError("harness needs N >= 1");
  if (v <= 0) throw ConfigError("harness needs v > 0");
  if (u <= 0) throw ConfigError("harness needs u > 0");
  if (epsilon < 0) throw ConfigError("harness needs epsilon >= 0");
  if (v * (3 * N + 2) > u)
    throw ConfigError("(3N+2)v = " + to_string(Rational(v * (3 * N + 2))) +
                      " exceeds u = " + to_string(u) + ": the bumps do not fit inside U");
}

std::vector<Rational> psi_factors(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const HarnessConfig& cfg, const Rational& x) {
  cfg.validate();
  const Rational reach = cfg.v * (3 * cfg.N + 1);
  const Interval needed = Interval::closed(x - reach, x + reach);
  if (!needed.subset_of(mu.window()) || !needed.subset_of(nu.window()))
    throw WindowError("Psi at " + to_string(x) + " needs both measures on " + to_string(needed));
  const DiscreteMeasure diff = combine(1, mu, -1, nu);
  std::vector<Rational> factors;
  factors.reserve(cfg.N);
  for (unsigned j = 1; j <= cfg.N; ++j) factors.push_back(convolution_at(bump(cfg.v, j), diff, x));
  return factors;
}

Rational psi(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const HarnessConfig& cfg,
             const Rational& x) {
  Rational product = 1;
  for (const auto& f : psi_factors(mu, nu, cfg, x)) product *= f;
  return product;
}

ZeroIdentityCertificate psi_zero_identity(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          const HarnessConfig& cfg) {
  cfg.validate();
  const Interval U = Interval::symmetric(cfg.v * (3 * cfg.N + 2), true);
  for (const auto* m : {&mu, &nu}) {
    if (!U.subset_of(m->window()))
      throw WindowError("neighborhood " + to_string(U) + " leaves the window " +
                        to_string(m->window()));
    for (const auto& a : m->atoms_in(U))
      if (a.position != 0)
        throw ConfigError(std::string("atom (") + to_string(a.position) + ", " +
                          to_string(a.mass) + ") of " + (m == &mu ? "mu" : "nu") +
                          " intrudes on U = " + to_string(U));
  }
  ZeroIdentityCertificate cert;
  cert.difference = mu.mass_at(0) - nu.mass_at(0);
  cert.psi_at_zero = psi(mu, nu, cfg, 0);
  cert.expected = power(cert.difference, cfg.N);
  cert.holds = cert.psi_at_zero == cert.expected;
  cert.degenerate = cert.difference == 0;
  return cert;
}

FarFieldReport far_field_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const HarnessConfig& cfg, std::span<const Rational> samples) {
  cfg.validate();
  if (cfg.epsilon <= 0) throw ConfigError("far-field check needs epsilon > 0");
  auto common = intersect(mu.window(), nu.window());
  if (!common) throw WindowError("measures have disjoint windows");
  const Rational reach = cfg.v * (3 * cfg.N + 1);
  if (common->length() <= 2 * reach)
    throw WindowError("common window " + to_string(*common) + " too short for the bumps");
  if (!cfg.K.subset_of(*common))
    throw ConfigError("K = " + to_string(cfg.K) + " is not inside the common window");

  FarFieldReport report;
  report.examined = Interval::closed(common->lo + reach, common->hi - reach);
  report.N = cfg.N;
  report.epsilon = cfg.epsilon;
  const Interval KU = cfg.K.widened(cfg.u, true);
  for (const auto& b : samples) {
    if (KU.contains(b))
      throw ConfigError("sample " + to_string(b) + " lies inside K + U = " + to_string(KU));
    if (!report.examined.contains(b))
      throw WindowError("sample " + to_string(b) + " outside the examined window " +
                        to_string(report.examined));
  }

  const DiscreteMeasure mu_w = restrict(mu, *common);
  const DiscreteMeasure nu_w = restrict(nu, *common);
  report.dm_required = dm_bound(mu_w, nu_w, cfg.u);
  if (cfg.N < report.dm_required)
    throw ConfigError("N = " + std::to_string(cfg.N) + " is below the sparsity bound " +
                      std::to_string(report.dm_required));

  const Interval shells[] = {cfg.K, *common};
  const MatchReport match = match_close(mu_w, nu_w, shells);
  const ShellProfile& outside = match.profile.front();
  report.max_delta_position_outside = outside.max_delta_position;
  report.max_delta_mass_outside = outside.max_delta_mass;
  report.hypothesis_holds = outside.unmatched_outside == 0 &&
                            outside.max_delta_position < cfg.v &&
                            outside.max_delta_mass < cfg.epsilon;

  const DiscreteMeasure diff = combine(1, mu_w, -1, nu_w);
  report.C = 0;
  for (unsigned j = 1; j <= cfg.N; ++j) {
    const SupWitness sup = sup_abs(convolve(bump(cfg.v, j), diff, report.examined), report.examined);
    if (sup.value > report.C) report.C = sup.value;
  }
  report.bound = cfg.epsilon * cfg.N * power(report.C, cfg.N - 1);

  report.pass = report.hypothesis_holds && !samples.empty();
  for (const auto& b : samples) {
    FarFieldSample sample{b, psi(mu_w, nu_w, cfg, b), false};
    sample.holds = abs(sample.psi) < report.bound;
    report.pass = report.pass && sample.holds;
    report.samples.push_back(std::move(sample));
  }
  return report;
}

DiscreteMeasure integer_comb(long first, long last, const Interval& window, const Rational& mass) {
  std::vector<Atom> atoms;
  for (long n = first; n <= last; ++n) atoms.push_back({Rational(n), mass});
  return make_measure(std::move(atoms), window);
}

DiscreteMeasure perturbed_comb(long first, long last, const Interval& window) {
  std::vector<Atom> atoms;
  for (long n = first; n <= last; ++n) {
    const unsigned long depth = static_cast<unsigned long>(n < 0 ? -n : n) + 1;
    atoms.push_back({Rational(n) + Rational(1, 8 * depth), Rational(1)});
  }
  return make_measure(std::move(atoms), window);
}

}  // namespace apm
