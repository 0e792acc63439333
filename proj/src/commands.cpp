#include "msol/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "msol/acceptance.hpp"
#include "msol/common.hpp"
#include "msol/csv.hpp"

namespace msol {

namespace {

Json rs_json(const RsReport& rs) {
  Json entries = Json::array();
  for (const auto& e : rs.entries)
    entries.push_back({{"name", e.name},
                       {"grid", e.grid},
                       {"current", e.current},
                       {"abs_error", e.abs_error},
                       {"rel_error", e.rel_error},
                       {"exact_form", e.exact_form}});
  return {{"entries", entries},
          {"max_rel_error", rs.max_rel_error},
          {"max_abs_exact", rs.max_abs_exact},
          {"closedness", rs.closedness},
          {"closedness_bound", rs.closedness_bound}};
}

Json strings_json(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

std::string measure_kind(const RawTransversalMeasure& m) {
  switch (m.kind) {
    case TransversalKind::Finite: return "weights";
    case TransversalKind::CantorPAdic: return "cylinder_weights";
    case TransversalKind::Circle: break;
  }
  if (!m.histogram.empty()) return "histogram";
  return m.atoms.empty() ? "density" : (m.density.is_constant() && m.density.constant == 0.0 ? "atoms" : "density+atoms");
}

Immersion need_immersion(const ExperimentConfig& cfg) {
  if (!cfg.immersion) throw ConfigError("immersion", "this command needs an immersion and the family has no default");
  return resolve_immersion(cfg);
}

void cmd_build(const ExperimentConfig& cfg, RunReport& rep) {
  const auto& sol = cfg.solenoid;
  const auto cls = classify_transversal(sol.space());
  const auto mv = minimality_verdict(sol, cfg.minimality.samples, cfg.minimality.n_steps, cfg.minimality.eps);
  const auto dyn = classify_dynamics(sol.space(), sol.map(), cfg.ulam);
  Json r;
  r["transversal"] = to_string(cls.transversal);
  r["solenoid_type"] = cls.solenoid_type;
  r["minimal"] = mv.minimal;
  r["worst_density_radius"] = mv.worst_radius;
  r["return_map_minimal"] = dyn.minimal;
  if (dyn.period) r["period"] = *dyn.period;
  if (cfg.immersion) {
    const auto chk = validate_immersion(*cfg.immersion, sol);
    r["immersion"] = {{"gluing_defect", chk.gluing_defect}, {"min_speed", chk.min_speed}};
  }
  rep.results = r;
}

void cmd_ergodic(const ExperimentConfig& cfg, RunReport& rep) {
  const auto& sol = cfg.solenoid;
  const auto dyn = classify_dynamics(sol.space(), sol.map(), cfg.ulam);
  Json ms = Json::array();
  CsvWriter csv({"index", "kind", "ergodic", "total_mass", "note"});
  for (std::size_t i = 0; i < dyn.ergodic_measures.size(); ++i) {
    const auto& e = dyn.ergodic_measures[i];
    Json mj = to_json(e.measure);
    ms.push_back({{"measure", mj}, {"ergodic", e.ergodic}, {"note", e.note}});
    csv.row({std::to_string(i), measure_kind(e.measure), e.ergodic ? "true" : "false",
             csv_number(total_mass(e.measure)), e.note});
  }
  Json r;
  r["minimal"] = dyn.minimal;
  r["uniquely_ergodic"] = dyn.uniquely_ergodic;
  r["method"] = dyn.method;
  r["ergodic_measure_count"] = dyn.ergodic_measures.size();
  r["measures"] = ms;
  if (dyn.period) r["period"] = *dyn.period;
  r["warnings"] = strings_json(dyn.warnings);
  rep.results = r;
  rep.files.emplace_back("ergodic.csv", csv.str());
}

void cmd_pair(const ExperimentConfig& cfg, RunReport& rep) {
  const auto imm = need_immersion(cfg);
  const auto m = resolve_measure(cfg);
  const auto forms = resolve_forms(cfg, imm.n);
  if (forms.empty()) throw ConfigError("forms", "no forms to pair");
  CsvWriter csv({"form_id", "value", "quad_error", "nodes_t", "cells_x"});
  Json rows = Json::array();
  for (const auto& f : forms) {
    const auto p = pair_current(imm, cfg.solenoid, m, f.form, cfg.quad);
    csv.row({f.name, csv_number(p.value), csv_number(p.quad_error_estimate), std::to_string(p.nodes_t),
             std::to_string(p.cells_x)});
    rows.push_back({{"form_id", f.name},
                    {"value", p.value},
                    {"quad_error", p.quad_error_estimate},
                    {"nodes_t", p.nodes_t},
                    {"cells_x", p.cells_x}});
  }
  rep.results = {{"pairings", rows}};
  rep.files.emplace_back("pair.csv", csv.str());
}

void cmd_homology(const ExperimentConfig& cfg, RunReport& rep) {
  const auto imm = need_immersion(cfg);
  const auto m = resolve_measure(cfg);
  const auto h = homology_class(imm, cfg.solenoid, m, cfg.quad);
  CsvWriter csv({"component", "value", "quad_error"});
  Json arr = Json::array();
  for (std::size_t i = 0; i < h.value.size(); ++i) {
    csv.row({"dtheta" + std::to_string(i + 1), csv_number(h.value[i]), csv_number(h.quad_error[i])});
    arr.push_back(h.value[i]);
  }
  Json err = Json::array();
  for (double e : h.quad_error) err.push_back(e);
  rep.results = {{"class", arr}, {"quad_error", err}, {"total_mass", total_mass(m.raw)}};
  rep.files.emplace_back("homology.csv", csv.str());
  rep.files.emplace_back("homology.json", arr.dump() + "\n");
}

void cmd_dualform(const ExperimentConfig& cfg, RunReport& rep) {
  const auto imm = need_immersion(cfg);
  const auto m = resolve_measure(cfg);
  DualFormOptions opts;
  opts.samples_per_radius = cfg.samples_per_radius;
  const auto df = pushforward_dual_form(imm, cfg.solenoid, m, ThomProfile::make(cfg.r, imm.n - 1), cfg.grid, opts);
  const auto& g = df.form;

  std::vector<std::string> header{"node_i", "node_j"};
  if (g.n == 3) header.push_back("node_k");
  Json order = Json::array();
  for (auto mask : g.masks) {
    header.push_back("phi_" + component_label(mask));
    order.push_back(component_label(mask));
  }
  CsvWriter csv(header);
  const auto G = static_cast<std::size_t>(g.G);
  std::vector<std::string> row(header.size());
  for (std::size_t node = 0; node < g.nodes(); ++node) {
    std::size_t rest = node, c = 0;
    if (g.n == 3) {
      row[0] = std::to_string(rest / (G * G));
      rest %= G * G;
      c = 1;
    }
    row[c] = std::to_string(rest / G);
    row[c + 1] = std::to_string(rest % G);
    for (std::size_t k = 0; k < g.masks.size(); ++k) row[c + 2 + k] = csv_number(g.comp[k][node]);
    csv.row(row);
  }

  // closed test forms: the coordinate classes plus any closed configured form
  std::vector<NamedForm> tests;
  for (int i = 1; i <= imm.n; ++i) tests.push_back({"dtheta" + std::to_string(i), TorusForm::dtheta(imm.n, i)});
  for (const auto& f : resolve_forms(cfg, imm.n)) {
    const bool dup = std::any_of(tests.begin(), tests.end(), [&](const NamedForm& t) { return t.name == f.name; });
    if (!dup && f.form.degree() == 1 && d(f.form).is_zero(1e-14)) tests.push_back(f);
  }
  const auto rs = rsform_check(imm, cfg.solenoid, m, cfg.r, cfg.grid, tests, opts);

  Json r;
  r["resolution"] = g.G;
  r["r"] = df.r;
  r["r1"] = df.r1;
  r["segments"] = df.segments;
  r["max_abs"] = g.max_abs();
  r["component_order"] = order;
  r["rs_check"] = rs_json(rs);
  r["warnings"] = strings_json(df.warnings);
  rep.results = r;
  Json head = {{"resolution", g.G}, {"n", g.n}, {"r", df.r}, {"component_order", order}};
  rep.files.emplace_back("dualform.csv", csv.str());
  rep.files.emplace_back("dualform.json", head.dump(2) + "\n");
}

void cmd_selfint(const ExperimentConfig& cfg, RunReport& rep) {
  const auto imm = need_immersion(cfg);
  const auto m = resolve_measure(cfg);
  DualFormOptions opts;
  opts.samples_per_radius = cfg.samples_per_radius;
  CsvWriter table({"G", "r", "r_prime", "value"});
  Json rows = Json::array();
  std::vector<std::string> warnings;
  double prev = 0.0;
  bool decreasing = true;
  for (int l = 0; l < cfg.refinements; ++l) {
    const int G = cfg.grid << l;
    const double r = std::ldexp(cfg.r, -l), rp = std::ldexp(cfg.r_prime, -l);
    const auto si = self_intersection(imm, cfg.solenoid, m, r, rp, G, cfg.fail_on_atoms, opts);
    table.row({std::to_string(G), csv_number(r), csv_number(rp), csv_number(si.value)});
    rows.push_back({{"G", G}, {"r", r}, {"r_prime", rp}, {"value", si.value}});
    if (l > 0 && std::fabs(si.value) > std::fabs(prev)) decreasing = false;
    prev = si.value;
    for (const auto& w : si.warnings) warnings.push_back(w);
  }
  CsvWriter fb({"depth", "c0", "sum", "cells"});
  Json fbrows = Json::array();
  for (int depth : cfg.flowbox_depths) {
    const auto b = flowbox_refinement_bound(imm, cfg.solenoid, m.raw, depth, cfg.r);
    fb.row({std::to_string(depth), csv_number(b.c0), csv_number(b.sum), std::to_string(b.bounds.size())});
    fbrows.push_back({{"depth", depth}, {"c0", b.c0}, {"sum", b.sum}, {"cells", b.bounds.size()}});
  }
  rep.results = {{"refinement", rows},
                 {"non_increasing", decreasing},
                 {"atoms", has_atoms(cfg.solenoid.space(), m.raw)},
                 {"flowbox", fbrows},
                 {"warnings", strings_json(warnings)}};
  rep.files.emplace_back("selfint.csv", table.str());
  rep.files.emplace_back("flowbox.csv", fb.str());
}

double part_mass(const SolenoidMeasure& mu) { return solenoid_total_mass(mu); }

void cmd_decompose(const ExperimentConfig& cfg, RunReport& rep) {
  if (!cfg.solenoid_measure) throw ConfigError("solenoid_measure", "decompose needs a solenoid measure");
  const auto dec = decompose(cfg.solenoid, *cfg.solenoid_measure);
  CsvWriter csv({"component", "kind", "mass"});
  Json rows = Json::array();
  auto add = [&](const char* component, const std::string& kind, double mass) {
    csv.row({component, kind, csv_number(mass)});
    rows.push_back({{"component", component}, {"kind", kind}, {"mass", mass}});
  };
  auto parts = [&](const char* component, const SolenoidMeasure& mu) {
    if (mu.daval_part) {
      SolenoidMeasure p;
      p.daval_part = mu.daval_part;
      add(component, "daval", part_mass(p));
    }
    for (std::size_t i = 0; i < mu.leaf_densities.size(); ++i) {
      SolenoidMeasure p;
      p.leaf_densities.push_back(mu.leaf_densities[i]);
      add(component, "leaf_density_" + std::to_string(i), part_mass(p));
    }
    for (std::size_t i = 0; i < mu.point_atoms.size(); ++i) add(component, "atom_" + std::to_string(i), mu.point_atoms[i].mass);
  };
  parts("regular", dec.regular);
  parts("irregular", dec.irregular);
  rep.results = {{"components", rows},
                 {"regular_mass", regular_mass(dec)},
                 {"irregular_mass", irregular_mass(dec)},
                 {"total_mass", solenoid_total_mass(*cfg.solenoid_measure)},
                 {"residual", dec.residual}};
  rep.files.emplace_back("decompose.csv", csv.str());
}

void cmd_acceptance(const ExperimentConfig&, RunReport& rep) {
  const auto res = run_acceptance();
  Json rows = Json::array();
  CsvWriter csv({"id", "name", "pass", "detail"});
  for (const auto& c : res) {
    rows.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"time_limit", c.time_limit}});
    csv.row({std::to_string(c.id), c.name, c.pass ? "PASS" : "FAIL", c.detail});
    rep.ok = rep.ok && c.pass;
  }
  rep.results = {{"criteria", rows}, {"all_pass", rep.ok}};
  rep.files.emplace_back("acceptance.csv", csv.str());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"build",    "ergodic", "pair",      "homology",
                                              "dualform", "selfint", "decompose", "acceptance"};
  return names;
}

std::string component_label(std::uint32_t mask) {
  std::string s;
  for (int i : mask_indices(mask)) s += std::to_string(i);
  return s.empty() ? "0" : s;
}

Json RunReport::to_json() const {
  Json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["config"] = echo;
  j["results"] = results;
  return j;
}

RunReport run_command(const std::string& command, const ExperimentConfig& cfg) {
  RunReport rep;
  rep.command = command;
  rep.echo = cfg.echo;
  const auto t0 = std::chrono::steady_clock::now();
  if (command == "build") cmd_build(cfg, rep);
  else if (command == "ergodic") cmd_ergodic(cfg, rep);
  else if (command == "pair") cmd_pair(cfg, rep);
  else if (command == "homology") cmd_homology(cfg, rep);
  else if (command == "dualform") cmd_dualform(cfg, rep);
  else if (command == "selfint") cmd_selfint(cfg, rep);
  else if (command == "decompose") cmd_decompose(cfg, rep);
  else if (command == "acceptance") cmd_acceptance(cfg, rep);
  else throw ConfigError("command", "unknown command '" + command + "'");
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void write_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    f << text;
  };
  put("report.json", report.to_json().dump(2) + "\n");
  put("timing.json", Json{{"command", report.command}, {"wall_seconds", report.wall_seconds}}.dump(2) + "\n");
  for (const auto& [name, text] : report.files) put(name, text);
}

}  // namespace msol
