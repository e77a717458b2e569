#include "dba/report.hpp"

#include <sstream>

namespace dba {

using nlohmann::json;

namespace {

const char* kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::Field: return "field";
    case AtomKind::Momentum: return "momentum";
    case AtomKind::Multiplier: return "multiplier";
  }
  return "field";
}

AtomKind kind_from(const std::string& s) {
  if (s == "field") return AtomKind::Field;
  if (s == "momentum") return AtomKind::Momentum;
  if (s == "multiplier") return AtomKind::Multiplier;
  throw std::invalid_argument("unknown atom kind '" + s + "'");
}

json atom_json(const JetAtom& a) {
  return {{"kind", kind_name(a.kind)}, {"name", a.name}, {"x_order", a.x_order}, {"t_order", a.t_order}};
}

JetAtom atom_from(const json& j) {
  return JetAtom{kind_from(j.at("kind")), j.at("name"), j.at("x_order"), j.at("t_order")};
}

json expr_json(const Expr& e) { return {{"text", to_string(e)}, {"tree", expr_tree(e)}}; }

Expr expr_from(const json& j) { return expr_from_tree(j.at("tree")); }

std::string generation_name(int g) {
  switch (g) {
    case 1: return "primary";
    case 2: return "secondary";
    case 3: return "tertiary";
  }
  return "generation " + std::to_string(g);
}

std::string eom_key(const JetAtom& a) { return to_string(a); }

JetAtom eom_lhs(const std::string& key) {
  std::string base = key.substr(0, key.size() - 2);  // strip "_t"
  if (base.rfind("pi_", 0) == 0) return JetAtom::momentum(base.substr(3)).with_t(1);
  return JetAtom::field(base, 0, 1);
}

}  // namespace

json expr_tree(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return {{"kind", "constant"}, {"value", e.value().get_str()}};
    case Expr::Kind::Atom: return {{"kind", "atom"}, {"atom", atom_json(e.atom())}};
    case Expr::Kind::Power:
      return {{"kind", "power"}, {"exponent", e.exponent()}, {"children", json::array({expr_tree(e.children()[0])})}};
    case Expr::Kind::Log: return {{"kind", "log"}, {"children", json::array({expr_tree(e.children()[0])})}};
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      json cs = json::array();
      for (const auto& c : e.children()) cs.push_back(expr_tree(c));
      return {{"kind", e.kind() == Expr::Kind::Sum ? "sum" : "product"}, {"children", cs}};
    }
  }
  return nullptr;
}

Expr expr_from_tree(const json& j) {
  const std::string k = j.at("kind");
  if (k == "constant") return Expr::constant(mpq_class(j.at("value").get<std::string>()));
  if (k == "atom") return Expr::atom(atom_from(j.at("atom")));
  std::vector<Expr> cs;
  for (const auto& c : j.at("children")) cs.push_back(expr_from_tree(c));
  if (k == "power") return Expr::power(cs.at(0), j.at("exponent").get<long>());
  if (k == "log") return Expr::log(cs.at(0));
  if (k == "sum") return Expr::sum(cs);
  if (k == "product") return Expr::product(cs);
  throw std::invalid_argument("unknown expression kind '" + k + "'");
}

json report_to_json(const AnalysisReport& r) {
  json j;
  j["fields"] = r.fields;
  j["lagrangian"] = expr_json(r.lagrangian);
  json h = json::array();
  for (const auto& row : r.hessian) {
    json jr = json::array();
    for (const auto& e : row) jr.push_back(expr_json(e));
    h.push_back(jr);
  }
  j["hessian"] = h;
  j["rank"] = r.rank;
  json cs = json::array();
  for (const auto& c : r.constraints)
    cs.push_back({{"label", c.label}, {"generation", c.generation}, {"density", expr_json(c.density)},
                  {"multiplier", c.multiplier}});
  j["constraints"] = cs;
  json ms = json::object();
  for (const auto& [n, v] : r.multiplier_solution) ms[n] = expr_json(v);
  j["multipliers"] = ms;
  json un = json::object();
  for (const auto& u : r.undetermined) un[u.multiplier] = u.condition ? expr_json(*u.condition) : json(nullptr);
  j["undetermined_multipliers"] = un;
  json as = json::array();
  for (const auto& a : r.assumptions) as.push_back(expr_json(a));
  j["assumptions"] = as;
  j["notes"] = r.notes;
  json rs = json::array();
  for (const auto& rule : r.reductions)
    rs.push_back({{"variable", {{"kind", kind_name(rule.variable.kind)}, {"name", rule.variable.name}}},
                  {"base_order", rule.base_order},
                  {"value", expr_json(rule.value)},
                  {"source", rule.source}});
  j["reductions"] = rs;
  j["canonical_hamiltonian"] = expr_json(r.canonical_h);
  j["total_hamiltonian"] = expr_json(r.total_h);
  json he = json::object();
  for (const auto& [a, v] : r.hamilton_eoms) he[eom_key(a)] = expr_json(v);
  j["hamilton_eoms"] = he;
  json le = json::object();
  for (const auto& [f, v] : r.lagrangian_eoms) le[f] = expr_json(v);
  j["lagrangian_eoms"] = le;
  j["iterations"] = r.iterations;
  j["cross_check"] = r.cross_check ? json(*r.cross_check) : json(nullptr);
  return j;
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.fields = j.at("fields").get<std::vector<std::string>>();
  r.lagrangian = expr_from(j.at("lagrangian"));
  for (const auto& row : j.at("hessian")) {
    std::vector<Expr> out;
    for (const auto& e : row) out.push_back(expr_from(e));
    r.hessian.push_back(out);
  }
  r.rank = j.at("rank");
  for (const auto& c : j.at("constraints"))
    r.constraints.push_back({c.at("label"), c.at("generation"), expr_from(c.at("density")), c.at("multiplier")});
  for (const auto& [n, v] : j.at("multipliers").items()) r.multiplier_solution.emplace_back(n, expr_from(v));
  for (const auto& [n, v] : j.at("undetermined_multipliers").items()) {
    MultiplierCondition u{n, std::nullopt};
    if (!v.is_null()) u.condition = expr_from(v);
    r.undetermined.push_back(u);
  }
  for (const auto& a : j.at("assumptions")) r.assumptions.push_back(expr_from(a));
  r.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& rule : j.at("reductions"))
    r.reductions.push_back({Variable{kind_from(rule.at("variable").at("kind")), rule.at("variable").at("name")},
                            rule.at("base_order"), expr_from(rule.at("value")), rule.at("source")});
  r.canonical_h = expr_from(j.at("canonical_hamiltonian"));
  r.total_h = expr_from(j.at("total_hamiltonian"));
  for (const auto& [k, v] : j.at("hamilton_eoms").items()) r.hamilton_eoms.emplace_back(eom_lhs(k), expr_from(v));
  for (const auto& [k, v] : j.at("lagrangian_eoms").items()) r.lagrangian_eoms.emplace_back(k, expr_from(v));
  r.iterations = j.at("iterations");
  if (!j.at("cross_check").is_null()) r.cross_check = j.at("cross_check").get<bool>();
  return r;
}

std::string render_plain(const AnalysisReport& r, bool color) {
  std::ostringstream o;
  auto head = [&](const std::string& s) {
    if (color)
      o << "\x1b[1m" << s << "\x1b[0m\n";
    else
      o << s << "\n";
  };
  std::string fields;
  for (const auto& f : r.fields) fields += (fields.empty() ? "" : ", ") + f;
  o << "fields: " << fields << "\n";
  o << "lagrangian: " << to_string(r.lagrangian) << "\n";
  o << "hessian rank: " << r.rank << " of " << r.fields.size() << "\n";
  head("constraints:");
  for (const auto& c : r.constraints)
    o << "  " << c.label << " = " << to_string(c.density) << "    [" << generation_name(c.generation) << ", "
      << c.multiplier << "]\n";
  head("multipliers:");
  for (const auto& [n, v] : r.multiplier_solution) o << "  " << n << " = " << to_string(v) << "\n";
  if (!r.undetermined.empty()) {
    head("undetermined multipliers:");
    for (const auto& u : r.undetermined)
      o << "  " << u.multiplier << (u.condition ? ": " + to_string(*u.condition) + " = 0" : ": free") << "\n";
  }
  if (!r.assumptions.empty()) {
    head("assumptions:");
    for (const auto& a : r.assumptions) o << "  " << to_string(a) << " != 0\n";
  }
  head("canonical hamiltonian:");
  o << "  " << to_string(r.canonical_h) << "\n";
  head("total hamiltonian:");
  o << "  " << to_string(r.total_h) << "\n";
  if (!r.hamilton_eoms.empty()) {
    head("hamilton equations:");
    for (const auto& [a, v] : r.hamilton_eoms) o << "  " << to_string(a) << " = " << to_string(v) << "\n";
  }
  head("lagrangian equations:");
  for (const auto& [f, v] : r.lagrangian_eoms) o << "  " << to_string(v) << " = 0\n";
  if (r.cross_check) o << "cross-check against lagrangian equations: " << (*r.cross_check ? "passed" : "FAILED") << "\n";
  o << "iterations: " << r.iterations << "\n";
  if (!r.notes.empty()) {
    head("notes:");
    for (const auto& n : r.notes) o << "  - " << n << "\n";
  }
  return o.str();
}

std::string render_latex(const AnalysisReport& r) {
  std::ostringstream o;
  o << "% Hessian rank " << r.rank << ", " << r.iterations << " iteration(s)\n";
  o << "\\begin{align*}\n";
  o << "  \\mathcal{L} &= " << to_latex(r.lagrangian) << "\\\\\n";
  for (const auto& c : r.constraints) o << "  " << latex_label(c.label) << " &= " << to_latex(c.density) << "\\\\\n";
  for (const auto& [n, v] : r.multiplier_solution) o << "  " << latex_label(n) << " &= " << to_latex(v) << "\\\\\n";
  for (const auto& u : r.undetermined)
    if (u.condition) o << "  0 &= " << to_latex(*u.condition) << "\\\\\n";
  o << "  \\mathcal{H}_L &= " << to_latex(r.canonical_h) << "\\\\\n";
  o << "  \\mathcal{H} &= " << to_latex(r.total_h);
  for (const auto& [a, v] : r.hamilton_eoms) o << "\\\\\n  " << to_latex(a) << " &= " << to_latex(v);
  o << "\n\\end{align*}\n";
  if (!r.assumptions.empty()) {
    o << "% assumed nonvanishing:";
    for (const auto& a : r.assumptions) o << " " << to_string(a);
    o << "\n";
  }
  for (const auto& n : r.notes) o << "% " << n << "\n";
  return o.str();
}

}  // namespace dba
