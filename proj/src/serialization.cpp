#include "apm/serialization.hpp"

#include <fstream>

#include "apm/errors.hpp"

namespace apm {

namespace {

std::string str(const Rational& q) { return to_string(q); }

Rational rational_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(Integer(v.dump(), 10));
  throw ConfigError(std::string("field '") + key + "' must be an exact fraction string");
}

bool bool_field(const Json& j, const char* key) {
  if (!j.contains(key)) return false;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string("field '") + key + "' must be boolean");
  return j.at(key).get<bool>();
}

Json strings(const std::vector<Rational>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(str(x));
  return out;
}

Json atom_json(const Atom& a) { return Json{{"pos", str(a.position)}, {"mass", str(a.mass)}}; }

Json atoms_json(const std::vector<Atom>& atoms) {
  Json out = Json::array();
  for (const auto& a : atoms) out.push_back(atom_json(a));
  return out;
}

}  // namespace

Json interval_to_json(const Interval& J) {
  return Json{{"lo", str(J.lo)}, {"hi", str(J.hi)}, {"lo_open", J.lo_open}, {"hi_open", J.hi_open}};
}

Interval interval_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("interval must be an object");
  Interval J{rational_field(j, "lo"), rational_field(j, "hi"), bool_field(j, "lo_open"),
             bool_field(j, "hi_open")};
  if (J.lo > J.hi) throw ConfigError("interval with lo > hi");
  return J;
}

Json measure_to_json(const DiscreteMeasure& mu) {
  return Json{{"window", interval_to_json(mu.window())}, {"atoms", atoms_json(mu.atoms())}};
}

DiscreteMeasure measure_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("window") || !j.contains("atoms") || !j.at("atoms").is_array())
    throw ConfigError("measure document needs 'window' and an 'atoms' array");
  const Interval window = interval_from_json(j.at("window"));
  std::vector<Atom> atoms;
  atoms.reserve(j.at("atoms").size());
  for (const auto& a : j.at("atoms")) {
    if (!a.is_object()) throw ConfigError("atom entries must be objects");
    atoms.push_back({rational_field(a, "pos"), rational_field(a, "mass")});
  }
  return make_measure(std::move(atoms), window);
}

Json provenance_to_json(const StageMeasure& stage) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < stage.size(); ++i) {
    Json steps = Json::array();
    Json stages = Json::array();
    for (const auto& st : stage.lineage(i)) {
      stages.push_back(st.stage);
      steps.push_back(Json{{"stage", st.stage}, {"side", st.side}, {"jitter", st.jitter}});
    }
    atoms.push_back(Json{{"pos", str(stage.measure().atoms()[i].position)},
                         {"provenance", std::move(stages)},
                         {"steps", std::move(steps)}});
  }
  return Json{{"stage", stage.stage()}, {"merge_events", stage.merge_events()}, {"atoms", std::move(atoms)}};
}

Json function_to_json(const PiecewiseLinearFn& f) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
    pts.push_back(Json{{"x", str(f.breakpoints()[i])}, {"y", str(f.values()[i])}});
  return Json{{"breakpoints", std::move(pts)}};
}

PiecewiseLinearFn function_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.at("breakpoints").is_array())
    throw ConfigError("function document needs a 'breakpoints' array");
  std::vector<Rational> xs, ys;
  for (const auto& p : j.at("breakpoints")) {
    xs.push_back(rational_field(p, "x"));
    ys.push_back(rational_field(p, "y"));
  }
  return PiecewiseLinearFn::from_points(std::move(xs), std::move(ys));
}

Json to_json(const TailCertificate& c) {
  return Json{{"N", c.first_index},
              {"M", c.truncation},
              {"lhs_upper_bound", str(c.lhs_upper_bound)},
              {"closed_form_bound", str(c.closed_form_bound)},
              {"rhs", str(c.rhs)},
              {"holds", c.holds}};
}

Json to_json(const CellMassReport& r) {
  Json j{{"holds", r.holds}, {"cells_checked", r.cells_checked}};
  if (r.failing_cell) {
    j["failing_cell"] = *r.failing_cell;
    j["failing_mass"] = str(r.failing_mass);
  }
  if (r.stray_atom) j["stray_atom"] = atom_json(*r.stray_atom);
  return j;
}

Json to_json(const MassDecayReport& r) {
  Json j{{"s", r.s},
         {"window", interval_to_json(r.window)},
         {"atoms_outside", r.atoms_outside},
         {"max_mass_outside", str(r.max_mass_outside)},
         {"bound", str(r.bound)},
         {"holds", r.holds}};
  if (r.argmax) j["argmax"] = str(*r.argmax);
  return j;
}

Json to_json(const ClusterCertificate& c) {
  return Json{{"ancestor", str(c.ancestor)},     {"shift", str(c.shift)},
              {"center", str(c.center)},         {"q", c.q.get_str()},
              {"eta", str(c.eta)},               {"member_mass", str(c.member_mass)},
              {"members", strings(c.members)},   {"count_matches", c.count_matches},
              {"within_eta", c.within_eta},      {"masses_match", c.masses_match},
              {"matches_operator", c.matches_operator},
              {"images_disjoint", c.images_disjoint},
              {"holds", c.holds()}};
}

Json to_json(const ApCertificate& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back(Json{{"tau", str(r.tau)}, {"defect", str(r.defect)}, {"witness", str(r.witness)}});
  Json j{{"s", c.s},
         {"epsilon", str(c.epsilon)},
         {"range", str(c.range)},
         {"gap", str(c.gap)},
         {"window", interval_to_json(c.window)},
         {"rows", std::move(rows)},
         {"max_defect", str(c.max_defect)},
         {"pass", c.pass}};
  if (c.predicted_bound) {
    j["predicted_bound"] = str(*c.predicted_bound);
    j["within_predicted_bound"] = c.within_predicted_bound;
  }
  return j;
}

Json to_json(const MatchReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(Json{{"mu", atom_json(p.mu)},
                         {"nu", atom_json(p.nu)},
                         {"delta_position", str(p.delta_position)},
                         {"delta_mass", str(p.delta_mass)}});
  Json profile = Json::array();
  for (const auto& s : r.profile)
    profile.push_back(Json{{"K", interval_to_json(s.K)},
                           {"pairs_outside", s.pairs_outside},
                           {"unmatched_outside", s.unmatched_outside},
                           {"max_delta_position", str(s.max_delta_position)},
                           {"max_delta_mass", str(s.max_delta_mass)}});
  return Json{{"domain", interval_to_json(r.domain)},
              {"pairs", std::move(pairs)},
              {"unmatched_mu", atoms_json(r.unmatched_mu)},
              {"unmatched_nu", atoms_json(r.unmatched_nu)},
              {"profile", std::move(profile)},
              {"certified_decreasing", r.certified_decreasing},
              {"come_close", r.come_close()},
              {"coincide", r.coincide}};
}

Json to_json(const LumpDecomposition& d) {
  Json lumps = Json::array();
  for (const auto& l : d.lumps)
    lumps.push_back(Json{{"mu", atoms_json(l.mu_atoms)},
                         {"nu", atoms_json(l.nu_atoms)},
                         {"lo", str(l.lo)},
                         {"hi", str(l.hi)},
                         {"diameter", str(l.diameter)},
                         {"mass_gap", str(l.mass_gap)},
                         {"within_v", l.within_v}});
  return Json{{"v", str(d.v)},
              {"u", str(d.u)},
              {"lumps", std::move(lumps)},
              {"max_lumps_per_window", d.max_lumps_per_window},
              {"witness", str(d.witness)}};
}

Json to_json(const ZeroIdentityCertificate& c) {
  return Json{{"difference", str(c.difference)},
              {"psi_at_zero", str(c.psi_at_zero)},
              {"expected", str(c.expected)},
              {"holds", c.holds},
              {"degenerate", c.degenerate}};
}

Json to_json(const FarFieldReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back(Json{{"b", str(s.b)}, {"psi", str(s.psi)}, {"holds", s.holds}});
  return Json{{"examined", interval_to_json(r.examined)},
              {"N", r.N},
              {"dm_required", r.dm_required},
              {"epsilon", str(r.epsilon)},
              {"C", str(r.C)},
              {"bound", str(r.bound)},
              {"hypothesis_holds", r.hypothesis_holds},
              {"max_delta_position_outside", str(r.max_delta_position_outside)},
              {"max_delta_mass_outside", str(r.max_delta_mass_outside)},
              {"samples", std::move(samples)},
              {"pass", r.pass}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
  return measure_from_json(read_json_file(path));
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu) {
  write_json_file(path, measure_to_json(mu));
}

}  // namespace apm
