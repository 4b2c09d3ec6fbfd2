// Command-line front end for the measure toolkit.
//
// Exit codes: 0 all checks passed, 1 a check failed (or a runtime error),
// 2 usage or input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "apm/construction.hpp"
#include "apm/errors.hpp"
#include "apm/piecewise_linear.hpp"
#include "apm/serialization.hpp"
#include "apm/uniqueness.hpp"

using namespace apm;

namespace {

int g_decimal = 0;

std::string fmt(const Rational& q) {
  std::string out = to_string(q);
  if (g_decimal > 0) out += " (" + to_decimal(q, g_decimal) + ")";
  return out;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

// "[lo,hi]", "(lo,hi)", mixed brackets, or bare "lo,hi" (closed).
Interval parse_interval(std::string text) {
  bool lo_open = false, hi_open = false;
  if (!text.empty() && (text.front() == '[' || text.front() == '(')) {
    lo_open = text.front() == '(';
    text.erase(0, 1);
    if (text.empty() || (text.back() != ']' && text.back() != ')'))
      throw ConfigError("unbalanced interval brackets");
    hi_open = text.back() == ')';
    text.pop_back();
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("interval needs 'lo,hi': " + text);
  Interval J{parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)),
             lo_open, hi_open};
  if (J.hi < J.lo) throw ConfigError("interval has hi < lo");
  return J;
}

std::vector<Rational> parse_list(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const auto& s : items) out.push_back(parse_rational(s));
  return out;
}

std::size_t atom_cap(std::optional<std::size_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("APM_ATOM_CAP")) {
    try {
      std::size_t used = 0;
      const auto cap = std::stoull(env, &used);
      if (used == std::string(env).size() && cap >= 1) return cap;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("APM_ATOM_CAP must be a positive integer, got '") + env + "'");
  }
  return kDefaultAtomCap;
}

unsigned parse_stage(const std::string& text) {
  std::size_t used = 0;
  long s = -1;
  try {
    s = std::stol(text, &used);
  } catch (const std::exception&) {
  }
  if (used != text.size() || s < 0 || s > static_cast<long>(kMaxStage))
    throw ConfigError("stage must be an integer in [0, " + std::to_string(kMaxStage) + "]");
  return static_cast<unsigned>(s);
}

void maybe_write(const std::string& path, const Json& report) {
  if (!path.empty()) write_json_file(path, report);
}

std::filesystem::path sidecar_path(const std::filesystem::path& out) {
  auto p = out;
  p.replace_extension();
  return p.string() + ".provenance.json";
}

PiecewiseLinearFn load_function(const std::string& path) {
  if (path.empty()) return default_test_function();
  return function_from_json(read_json_file(path));
}

// --- build -----------------------------------------------------------------

struct BuildArgs {
  std::string stage;
  std::string out;
  std::optional<std::size_t> cap;
};

int cmd_build(const BuildArgs& a) {
  const unsigned s = parse_stage(a.stage);
  const auto st = build_stage(s, atom_cap(a.cap));
  std::cout << "atoms=" << st.size() << " mass=" << fmt(st.measure().total_mass()) << "\n";
  if (!a.out.empty()) {
    write_measure(a.out, st.measure());
    write_json_file(sidecar_path(a.out), provenance_to_json(st));
  }
  return 0;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string stage;
  std::string measure;
  unsigned tail_max = 12;
  std::optional<std::size_t> cap;
  std::string report;
};

int cmd_verify(const VerifyArgs& a) {
  const unsigned s = parse_stage(a.stage);
  if (s < 1) throw ConfigError("verify needs stage >= 1");
  if (a.tail_max < 2) throw ConfigError("--tail-max must be at least 2");
  LimitMeasure limit(atom_cap(a.cap));
  const DiscreteMeasure mu = a.measure.empty() ? limit.stage(s).measure() : read_measure(a.measure);
  Json report = Json::object();
  bool all = true;

  const auto support = check_support_in_stage_interval(mu, s);
  all = all && support.holds;
  std::cout << verdict(support.holds) << " support inside I_" << s;
  if (support.witness)
    std::cout << ": atom at " << fmt(support.witness->position) << " lies outside";
  std::cout << "\n";
  report["support"] = {{"holds", support.holds}};

  const auto cells = check_cell_mass(mu, s);
  all = all && cells.holds;
  std::cout << verdict(cells.holds) << " unit mass on " << cells.cells_checked << " cells";
  if (cells.failing_cell)
    std::cout << ": cell " << *cells.failing_cell << " has mass " << fmt(cells.failing_mass);
  if (cells.stray_atom) std::cout << ": atom at " << fmt(cells.stray_atom->position) << " lies in no cell";
  std::cout << "\n";
  report["cell_mass"] = to_json(cells);

  const auto decay = verify_mass_decay(limit, s, stage_window(s + 1));
  all = all && decay.holds;
  std::cout << verdict(decay.holds) << " mass outside I_" << s << " is " << fmt(decay.max_mass_outside)
            << " < " << fmt(decay.bound) << "\n";
  report["mass_decay"] = to_json(decay);

  const bool stable = equal_on_common_window(restrict(limit.stage(s + 1).measure(), stage_window(s)), mu) &&
                      mu.window() == stage_window(s);
  all = all && stable;
  std::cout << verdict(stable) << " mu_" << s + 1 << " restricted to I_" << s << " equals mu_" << s << "\n";
  report["stability"] = {{"holds", stable}};

  Json tails = Json::array();
  bool tails_ok = true;
  for (unsigned N = 2; N <= a.tail_max; ++N) {
    const auto c = verify_tail_estimate(N);
    tails_ok = tails_ok && c.holds;
    tails.push_back(to_json(c));
    if (!c.holds) std::cout << "FAIL tail estimate at N=" << N << "\n";
  }
  all = all && tails_ok;
  std::cout << verdict(tails_ok) << " tail estimate for N=2.." << a.tail_max << "\n";
  report["tail"] = std::move(tails);

  report["pass"] = all;
  maybe_write(a.report, report);
  return all ? 0 : 1;
}

// --- ap --------------------------------------------------------------------

struct ApArgs {
  std::string stage;
  std::string epsilon;
  std::string range;
  std::string window = "[-1/2,1/2]";
  std::string function;
  std::optional<std::size_t> cap;
  std::string report;
};

int cmd_ap(const ApArgs& a) {
  const unsigned s = parse_stage(a.stage);
  const Rational eps = parse_rational(a.epsilon);
  const Rational R = parse_rational(a.range);
  const Interval J = parse_interval(a.window);
  const auto f = load_function(a.function);
  LimitMeasure limit(atom_cap(a.cap));
  const auto cert = ap_certificate(f, limit, eps, R, s, J);
  std::cout << "tau,defect,witness\n";
  for (const auto& r : cert.rows)
    std::cout << fmt(r.tau) << "," << fmt(r.defect) << "," << fmt(r.witness) << "\n";
  std::cout << "max defect " << fmt(cert.max_defect) << " vs epsilon " << fmt(eps) << "\n";
  if (cert.predicted_bound)
    std::cout << verdict(cert.within_predicted_bound) << " below Lip(f) * tail = "
              << fmt(*cert.predicted_bound) << "\n";
  std::cout << verdict(cert.pass) << " every candidate period is an epsilon-almost period\n";
  maybe_write(a.report, to_json(cert));
  return cert.pass ? 0 : 1;
}

// --- conv ------------------------------------------------------------------

struct ConvArgs {
  std::string measure;
  std::string function;
  std::string window;
  std::vector<std::string> at;
  std::string csv;
  std::optional<std::size_t> cap;
};

int cmd_conv(const ConvArgs& a) {
  const Interval J = parse_interval(a.window);
  const auto f = load_function(a.function);
  DiscreteMeasure mu;
  if (a.measure.empty()) {
    const auto reach = f.support();
    limit_window(J, atom_cap(a.cap));  // validates J against the stages
    mu = limit_window(Interval::closed(J.lo - reach.hi, J.hi - reach.lo), atom_cap(a.cap));
  } else {
    mu = read_measure(a.measure);
  }
  const auto g = convolve(f, mu, J);
  for (const auto& x : parse_list(a.at)) {
    if (!J.contains(x)) throw ConfigError("point " + to_string(x) + " is outside the window");
    std::cout << "(f*mu)(" << to_string(x) << ") = " << fmt(g(x)) << "\n";
  }
  const auto peak = sup_abs(g, J);
  std::cout << "sup |f*mu| on " << to_string(J) << " = " << fmt(peak.value) << " at "
            << fmt(peak.witness) << "\n";
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw ResourceError("cannot write " + a.csv);
    out << "x,value,x_approx,value_approx\n";
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      out << to_string(g.xs[i]) << "," << to_string(g.ys[i]) << ","
          << to_decimal(g.xs[i], 12).substr(1) << "," << to_decimal(g.ys[i], 12).substr(1) << "\n";
  }
  return 0;
}

// --- harness ---------------------------------------------------------------

void print_match(const MatchReport& r) {
  std::cout << "matched " << r.pairs.size() << " pairs on " << to_string(r.domain) << ", unmatched "
            << r.unmatched_mu.size() << " + " << r.unmatched_nu.size() << "\n";
  for (const auto& sh : r.profile)
    std::cout << "  outside " << to_string(sh.K) << ": pairs=" << sh.pairs_outside
              << " max|dpos|=" << fmt(sh.max_delta_position)
              << " max|dmass|=" << fmt(sh.max_delta_mass) << "\n";
  std::cout << "come close: " << (r.come_close() ? "certified (window)" : "no")
            << ", coincide: " << (r.coincide ? "yes" : "no")
            << ", measures differ: " << (r.coincide ? "no" : "yes") << "\n";
}

bool run_harness(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const HarnessConfig& cfg,
                 const std::vector<Rational>& samples, Json& report) {
  std::cout << "harness v=" << fmt(cfg.v) << " N=" << cfg.N << " epsilon=" << fmt(cfg.epsilon)
            << " u=" << fmt(cfg.u) << " K=" << to_string(cfg.K) << "\n";
  const auto zero = psi_zero_identity(mu, nu, cfg);
  std::cout << verdict(zero.holds) << " Psi(0) = " << fmt(zero.psi_at_zero) << " = ("
            << fmt(zero.difference) << ")^" << cfg.N << (zero.degenerate ? " [degenerate]" : "")
            << "\n";
  const auto far = far_field_check(mu, nu, cfg, samples);
  std::cout << "C = " << fmt(far.C) << " on " << to_string(far.examined)
            << ", bound N eps C^(N-1) = " << fmt(far.bound) << "\n";
  std::cout << (far.hypothesis_holds ? "" : "note: ") << "matching outside K: max|dpos|="
            << fmt(far.max_delta_position_outside)
            << " max|dmass|=" << fmt(far.max_delta_mass_outside) << "\n";
  for (const auto& smp : far.samples)
    std::cout << verdict(smp.holds) << " |Psi(" << to_string(smp.b) << ")| = " << fmt(abs(smp.psi))
              << "\n";
  std::cout << verdict(far.pass) << " far field\n";
  report["zero_identity"] = to_json(zero);
  report["far_field"] = to_json(far);
  return zero.holds && far.pass;
}

struct MatchArgs {
  std::string mu;
  std::string nu;
  std::vector<std::string> windows;
  bool psi = false;
  std::string v;
  std::optional<unsigned> N;
  std::string epsilon;
  std::string K;
  std::string u;
  std::vector<std::string> samples;
  std::string report;
};

HarnessConfig harness_from(const MatchArgs& a, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (a.u.empty() || a.epsilon.empty() || a.K.empty())
    throw ConfigError("--psi needs --u, --epsilon and --K");
  HarnessConfig cfg;
  cfg.u = parse_rational(a.u);
  cfg.epsilon = parse_rational(a.epsilon);
  cfg.K = parse_interval(a.K);
  cfg.N = a.N ? *a.N : dm_bound(mu, nu, cfg.u);
  cfg.v = a.v.empty() ? Rational(cfg.u / (3 * cfg.N + 2)) : parse_rational(a.v);
  cfg.validate();
  return cfg;
}

int cmd_match(const MatchArgs& a) {
  const auto mu = read_measure(a.mu);
  const auto nu = read_measure(a.nu);
  std::vector<Interval> windows;
  for (const auto& w : a.windows) windows.push_back(parse_interval(w));
  const auto r = match_close(mu, nu, windows);
  print_match(r);
  Json report = {{"match", to_json(r)}};
  bool ok = true;
  if (a.psi) {
    if (a.samples.empty()) throw ConfigError("--psi needs --samples");
    ok = run_harness(mu, nu, harness_from(a, mu, nu), parse_list(a.samples), report);
  }
  maybe_write(a.report, report);
  return ok ? 0 : 1;
}

// Built-in scenarios: a perturbed integer comb, and the constructed measure
// against twice itself.
struct PsiArgs {
  std::string scenario = "comb";
  std::vector<std::string> samples;
  std::optional<std::size_t> cap;
  std::string report;
};

int cmd_psi(const PsiArgs& a) {
  Json report = Json::object();
  bool ok = true;
  if (a.scenario == "comb") {
    const Interval w = Interval::closed(Rational(-121, 2), Rational(121, 2));
    const auto mu = integer_comb(-60, 60, w);
    const auto nu = perturbed_comb(-60, 60, w);
    const HarnessConfig cfg{Rational(1, 64), 2, Rational(1, 100), Interval::closed(-10, 10),
                            Rational(1, 4)};
    const auto samples = a.samples.empty() ? std::vector<Rational>{12, 20, 50} : parse_list(a.samples);
    const auto lifted = combine(1, mu, 1, make_measure({{0, 1}}, w));
    std::cout << "zero identity on comb + delta_0 against comb\n";
    const auto zero = psi_zero_identity(lifted, mu, cfg);
    std::cout << verdict(zero.holds) << " Psi(0) = " << fmt(zero.psi_at_zero) << "\n";
    report["lifted_zero_identity"] = to_json(zero);
    ok = zero.holds;
    std::cout << "far field on comb against perturbed comb\n";
    ok = run_harness(mu, nu, cfg, samples, report) && ok;
  } else if (a.scenario == "double") {
    LimitMeasure limit(atom_cap(a.cap));
    const auto mu = limit.window(Interval::closed(-40, 40));
    const auto nu = scale(mu, 2);
    const unsigned s = 2;
    const Rational u = pow2(-20);
    const unsigned N = dm_bound(mu, nu, u);
    const HarnessConfig cfg{u / (3 * N + 2), N, Rational(1, 2 * s),
                            Interval::closed(-pow3(s), pow3(s)), u};
    std::vector<Rational> samples;
    if (a.samples.empty()) {
      for (const Rational& target : {Rational(10), Rational(20), Rational(39)})
        for (const auto& atom : mu.atoms())
          if (atom.position >= target) {
            samples.push_back(atom.position);
            break;
          }
    } else {
      samples = parse_list(a.samples);
    }
    std::vector<Interval> shells;
    for (unsigned k = 1; k <= 3; ++k) shells.push_back(stage_window(k).interior());
    shells.push_back(mu.window());
    const auto r = match_close(mu, nu, shells);
    print_match(r);
    report["match"] = to_json(r);
    ok = run_harness(mu, nu, cfg, samples, report);
  } else {
    throw ConfigError("unknown scenario '" + a.scenario + "' (comb or double)");
  }
  report["pass"] = ok;
  maybe_write(a.report, report);
  return ok ? 0 : 1;
}

struct LumpArgs {
  std::string mu;
  std::string nu;
  std::string v;
  std::string u;
  std::string report;
};

int cmd_lump(const LumpArgs& a) {
  const auto mu = read_measure(a.mu);
  const auto nu = a.nu.empty() ? make_measure({}, mu.window()) : read_measure(a.nu);
  std::optional<Rational> u;
  if (!a.u.empty()) u = parse_rational(a.u);
  const auto d = lump_decompose(mu, nu, parse_rational(a.v), u);
  std::cout << "lumps=" << d.lumps.size() << " max per window=" << d.max_lumps_per_window
            << " near " << fmt(d.witness) << "\n";
  std::cout << "lo,hi,diameter,mu_atoms,nu_atoms,mass_gap\n";
  for (const auto& l : d.lumps)
    std::cout << fmt(l.lo) << "," << fmt(l.hi) << "," << fmt(l.diameter) << "," << l.mu_atoms.size()
              << "," << l.nu_atoms.size() << "," << fmt(l.mass_gap) << "\n";
  maybe_write(a.report, to_json(d));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact discrete measure toolkit"};
  app.require_subcommand(1);
  app.add_option("--decimal", g_decimal, "Append k-digit decimal approximations")
      ->check(CLI::Range(0, 100));

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build stage s and export it");
  b->add_option("--stage,-s", build.stage, "Stage index")->required();
  b->add_option("--out,-o", build.out, "Measure file (a .provenance.json sidecar is written next to it)");
  b->add_option("--cap", build.cap, "Atom cap (overrides APM_ATOM_CAP)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run the stage verification suite");
  v->add_option("--stage,-s", verify.stage, "Stage index")->required();
  v->add_option("--measure,-m", verify.measure, "Check this measure file instead of the built stage");
  v->add_option("--tail-max", verify.tail_max, "Largest N for the tail estimate");
  v->add_option("--cap", verify.cap, "Atom cap");
  v->add_option("--report", verify.report, "Write a JSON report");

  ApArgs ap;
  auto* p = app.add_subcommand("ap", "Almost-period defect table");
  p->add_option("--stage,-s", ap.stage, "Stage s; candidate periods are multiples of 3^s")->required();
  p->add_option("--epsilon,-e", ap.epsilon, "Tolerance")->required();
  p->add_option("--range,-R", ap.range, "Largest |tau|")->required();
  p->add_option("--window,-J", ap.window, "Window J");
  p->add_option("--function,-f", ap.function, "Piecewise-linear test function file");
  p->add_option("--cap", ap.cap, "Atom cap");
  p->add_option("--report", ap.report, "Write a JSON report");

  ConvArgs conv;
  auto* c = app.add_subcommand("conv", "Exact convolution f * mu on a window");
  c->add_option("--window,-J", conv.window, "Window J")->required();
  c->add_option("--measure,-m", conv.measure, "Measure file (default: the limit measure)");
  c->add_option("--function,-f", conv.function, "Piecewise-linear test function file");
  c->add_option("--at", conv.at, "Evaluation points");
  c->add_option("--csv", conv.csv, "Write breakpoints as CSV");
  c->add_option("--cap", conv.cap, "Atom cap");

  MatchArgs match;
  auto* m = app.add_subcommand("match", "Close-at-infinity matching between two measures");
  m->add_option("--mu", match.mu, "First measure file")->required();
  m->add_option("--nu", match.nu, "Second measure file")->required();
  // One window per occurrence; otherwise CLI11 would split "[lo,hi]" as a list.
  m->add_option("--window,-J", match.windows, "Nested windows, innermost first (repeatable)")
      ->allow_extra_args(false);
  m->add_flag("--psi", match.psi, "Also run the Psi harness");
  m->add_option("--v", match.v, "Bump half-width (default u/(3N+2))");
  m->add_option("--N", match.N, "Number of factors (default from dm_bound)");
  m->add_option("--epsilon", match.epsilon, "Mass tolerance outside K");
  m->add_option("--K", match.K, "Compact set K");
  m->add_option("--u", match.u, "Half-width of U");
  m->add_option("--samples", match.samples, "Far-field sample points");
  m->add_option("--report", match.report, "Write a JSON report");

  PsiArgs psi;
  auto* ps = app.add_subcommand("psi", "Built-in Psi harness scenarios");
  ps->add_option("--scenario", psi.scenario, "comb or double");
  ps->add_option("--samples", psi.samples, "Override the sample points");
  ps->add_option("--cap", psi.cap, "Atom cap");
  ps->add_option("--report", psi.report, "Write a JSON report");

  LumpArgs lump;
  auto* l = app.add_subcommand("lump", "Lump decomposition");
  l->add_option("--mu", lump.mu, "First measure file")->required();
  l->add_option("--nu", lump.nu, "Second measure file (default: empty)");
  l->add_option("--v", lump.v, "Linking distance")->required();
  l->add_option("--u", lump.u, "Sliding window half-width (default v)");
  l->add_option("--report", lump.report, "Write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*b) return cmd_build(build);
    if (*v) return cmd_verify(verify);
    if (*p) return cmd_ap(ap);
    if (*c) return cmd_conv(conv);
    if (*m) return cmd_match(match);
    if (*ps) return cmd_psi(psi);
    if (*l) return cmd_lump(lump);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
