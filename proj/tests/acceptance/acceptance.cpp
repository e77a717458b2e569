// Acceptance checks, one per criterion. `dba_acceptance N` runs criterion N
// and prints a single PASS/FAIL line; without arguments all are run.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "dba/numerics.hpp"
#include "support/testing.hpp"

using namespace dba;
using namespace dba::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

const std::vector<std::string> kNls{"phi", "theta"}, kKdv{"phi", "psi"}, kFourth{"phi", "theta", "xi", "gamma"};

const Constraint* find_constraint(const AnalysisReport& r, const Expr& density) {
  for (const auto& c : r.constraints)
    if (c.density == normalize(density)) return &c;
  return nullptr;
}

bool eom_is(const AnalysisReport& r, const JetAtom& lhs, const Expr& printed) {
  auto e = r.hamilton_eom(lhs);
  return e && is_zero(*e - printed);
}

Outcome criterion1() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  LagrangianSpec spec = parse(find_builtin("cubic-nls")->lagrangian);
  AnalysisReport r = analyze(spec);
  std::vector<Constraint> primaries;
  for (const auto& c : r.constraints)
    if (c.generation == 1) primaries.push_back(c);
  o.require(r.constraints.size() == 2 && primaries.size() == 2, "exactly two primary constraints");
  o.require(find_constraint(r, P("pi_phi")) != nullptr, "c1 = pi_phi");
  o.require(find_constraint(r, P("pi_theta + 1/2*phi^2")) != nullptr, "c2 = pi_theta + phi^2/2");
  o.require(is_zero(r.multiplier("lambda1").value_or(Expr(mpq_class(1, 7))) - P("-Dx(Dx(theta))*phi - 2*Dx(phi)*Dx(theta)")), "lambda1");
  o.require(is_zero(r.multiplier("lambda2").value_or(Expr(mpq_class(1, 7))) - P("2*phi^2 - Dx(theta)^2 + Dx(Dx(phi))/phi")), "lambda2");
  Expr printed_h = P("1/2*phi^4 + pi_phi*(-phi*Dx(Dx(theta)) - 2*Dx(phi)*Dx(theta)) + pi_theta*(2*phi^2 - "
                     "Dx(theta)^2 + Dx(Dx(phi))/phi)");
  o.require(equal_mod_dx(r.total_h, printed_h), "total Hamiltonian density");
  // Momenta replaced by their Lagrangian values.
  std::map<JetAtom, Expr> momenta;
  for (const auto& f : spec.fields) momenta[JetAtom::momentum(f)] = partial_diff(spec.density, F(f, 0, 1));
  Expr substituted = substitute(r.total_h, momenta);
  o.require(equal_mod_dx(substituted, P("1/2*Dx(phi)^2 + 1/2*phi^2*Dx(theta)^2 - 1/2*phi^4")),
            "momentum-substituted Hamiltonian");
  double secs = seconds_since(t0);
  o.require(secs < 5, "runtime " + fmt(secs) + " s");
  o.summary = "runtime " + fmt(secs) + " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const AnalysisReport& c = builtin("cubic-nls").report;
  Expr phi = F("phi");
  o.require(eom_is(c, F("phi", 0, 1), P("-Dx(Dx(theta))*phi - 2*Dx(phi)*Dx(theta)")), "cubic phi_t");
  o.require(is_zero(phi * *c.hamilton_eom(F("theta", 0, 1)) - P("2*phi^3 + Dx(Dx(phi)) - phi*Dx(theta)^2")),
            "cubic phi*theta_t");
  o.require(eom_is(c, JetAtom::momentum("phi").with_t(1), Expr(0)), "cubic (pi_phi)_t");
  o.require(eom_is(c, JetAtom::momentum("theta").with_t(1), P("2*phi*Dx(phi)*Dx(theta) + phi^2*Dx(Dx(theta))")),
            "cubic (pi_theta)_t");
  const AnalysisReport& l = builtin("log-nls").report;
  o.require(eom_is(l, F("phi", 0, 1), P("-2*Dx(phi)*Dx(theta) - phi*Dx(Dx(theta))")), "log phi_t");
  o.require(is_zero(phi * *l.hamilton_eom(F("theta", 0, 1)) - P("Dx(Dx(phi)) - phi*Dx(theta)^2 + 2*phi*ln(phi)")),
            "log phi*theta_t");
  o.require(eom_is(l, JetAtom::momentum("phi").with_t(1), Expr(0)), "log (pi_phi)_t");
  o.require(eom_is(l, JetAtom::momentum("theta").with_t(1), P("2*phi*Dx(phi)*Dx(theta) + phi^2*Dx(Dx(theta))")),
            "log (pi_theta)_t");
  o.summary = "8 equations, zero symbolic difference";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const AnalysisReport& r = builtin("kdv").report;
  Expr h_primary = canonical_hamiltonian(builtin("kdv").spec);
  for (const auto& c : r.constraints)
    if (c.generation == 1) h_primary = h_primary + Expr(JetAtom::multiplier(c.multiplier)) * c.density;
  Expr bracket = poisson_with_hamiltonian(P("pi_psi", kKdv), h_primary);
  o.require(is_zero(bracket - P("psi - Dx(Dx(phi))", kKdv)), "consistency of pi_psi gives psi - phi_xx");
  int secondaries = 0;
  for (const auto& c : r.constraints) secondaries += c.generation > 1;
  o.require(secondaries == 1 && find_constraint(r, P("psi - Dx(Dx(phi))", kKdv)) != nullptr,
            "single secondary constraint psi - phi_xx");
  Expr phi_t = P("-3*Dx(phi)^2 - Dx(Dx(Dx(phi)))", kKdv);
  o.require(eom_is(r, F("phi", 0, 1), phi_t), "phi_t");
  o.require(is_zero(total_dx(*r.hamilton_eom(F("phi", 0, 1))) - P("-6*Dx(phi)*Dx(Dx(phi)) - Dx(Dx(Dx(Dx(phi))))", kKdv)),
            "phi_xt");
  o.require(eom_is(r, F("psi", 0, 1), P("-6*Dx(Dx(phi))^2 - 6*Dx(phi)*Dx(Dx(Dx(phi))) - Dx(Dx(Dx(Dx(Dx(phi)))))", kKdv)),
            "psi_t");
  Expr printed = P("1/2*Dx(phi)^3 + 1/2*psi^2 + Dx(phi)*Dx(psi) + 1/2*Dx(Dx(phi))^2 - pi_phi*(Dx(Dx(Dx(phi))) + "
                   "3*Dx(phi)^2) - pi_psi*(Dx(Dx(Dx(Dx(Dx(phi))))) + 6*Dx(Dx(phi))^2 + 6*Dx(phi)*Dx(Dx(Dx(phi))))",
                   kKdv);
  if (equal_mod_dx(r.total_h, printed)) {
    o.notes.push_back("final Hamiltonian equals the printed one modulo total derivatives");
  } else {
    Expr residual = normalize(printed - r.total_h);
    Expr sq = P("(psi - Dx(Dx(phi)))^2", kKdv);
    bool square = equal_mod_dx(residual, sq);
    o.notes.push_back("final Hamiltonian differs from the printed one; printed - engine = " +
                      (square ? std::string("(psi - phi_xx)^2") : to_string(residual)) + " modulo total derivatives");
    // The residual must not change the dynamics: up to total derivatives it
    // vanishes with its first variations on shell.
    bool inert = is_zero(reduce(r, square ? sq : residual));
    for (const auto& f : r.fields) inert = inert && is_zero(reduce(r, euler_op(residual, Variable::field(f))));
    o.require(inert, "Hamiltonian residual vanishes with its variations on the constraint surface");
  }
  o.summary = "secondary psi - phi_xx, equations match";
  return o;
}

// Replaces xi -> phi_x and gamma -> theta_xx in every jet.
Expr eliminate_auxiliaries(const Expr& e) {
  std::map<JetAtom, Expr> bind;
  for (const auto& a : atoms(e)) {
    if (a.kind != AtomKind::Field || a.t_order != 0) continue;
    if (a.name == "xi") bind.emplace(a, Expr(F("phi", a.x_order + 1)));
    if (a.name == "gamma") bind.emplace(a, Expr(F("theta", a.x_order + 2)));
  }
  return substitute(e, bind);
}

Outcome criterion4() {
  Outcome o;
  const Analyzed& aux = builtin("fourth-order-nls");
  const AnalysisReport& r = aux.report;
  int primaries = 0, secondaries = 0, higher = 0;
  for (const auto& c : r.constraints) (c.generation == 1 ? primaries : c.generation == 2 ? secondaries : higher)++;
  o.require(primaries == 4, "four primary constraints");
  o.require(secondaries == 2, "exactly two secondary constraints");
  o.require(higher == 0, "no tertiary constraints");
  o.require(find_constraint(r, P("6*Dx(theta)^2*xi - xi - Dx(Dx(xi))", kFourth)) != nullptr, "ct1");
  o.require(find_constraint(r, P("phi*(2*phi*Dx(Dx(theta)) + 4*Dx(phi)*Dx(theta) - 3*phi*gamma)", kFourth)) != nullptr,
            "ct2 up to the factor phi");
  for (const auto& c : r.constraints)
    if (c.generation == 2)
      o.require(!contains_kind(c.density, AtomKind::Multiplier), c.label + " free of multipliers");

  Grid g = Grid::make(256, 2 * M_PI);
  EquivalenceResult own = check_eom_equivalence(aux.spec, r, g, 42, 1e-8);
  o.require(own.passed && own.samples == 20, "auxiliary system against its Lagrangian: " + fmt(own.max_rel_error));

  // Printed fourth-order equations, through the higher-derivative Lagrangian.
  const CorpusEntry* direct = find_builtin("fourth-order-nls-direct");
  const Analyzed& d = builtin("fourth-order-nls-direct");
  ReferenceSystem printed = parse_reference(*direct->eom);
  EquivalenceResult ref = check_eom_equivalence(d.spec, d.report, g, 42, 1e-8, &printed);
  o.require(ref.passed && ref.samples == 20, "direct Lagrangian against the printed equations: " + fmt(ref.max_rel_error));

  // The auxiliary-field Lagrangian itself is not equivalent to the printed equations.
  auto phi_t = r.hamilton_eom(F("phi", 0, 1));
  bool same = phi_t && is_zero(eliminate_auxiliaries(*phi_t) - printed.equations[0].rhs);
  o.notes.push_back(std::string("auxiliary-field phi_t with xi = phi_x, gamma = theta_xx ") +
                    (same ? "matches" : "does not match") + " the printed phi_t; the printed equations are checked " +
                    "through the higher-derivative Lagrangian");
  o.summary = "2 secondary, 0 tertiary; errors " + fmt(own.max_rel_error) + " (auxiliary), " + fmt(ref.max_rel_error) +
              " (printed, n = 256, 20 fields)";
  return o;
}

Outcome criterion5() {
  Outcome o;
  Grid g = Grid::make(256, 2 * M_PI);
  double worst = 0;
  for (const char* name : {"cubic-nls", "log-nls", "kdv", "fourth-order-nls"}) {
    const Analyzed& a = builtin(name);
    const CorpusEntry* e = find_builtin(name);
    std::optional<ReferenceSystem> ref;
    if (e->eom) ref = parse_reference(*e->eom);
    EquivalenceResult res = check_eom_equivalence(a.spec, a.report, g, 42, 1e-8, ref ? &*ref : nullptr);
    worst = std::max(worst, res.max_rel_error);
    o.require(res.passed && res.max_rel_error < 1e-8, std::string(name) + " " + fmt(res.max_rel_error));
  }
  o.summary = "max relative error " + fmt(worst);
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const AnalysisReport& r = builtin("cubic-nls").report;
  // sech'' = sech - 2 sech^3, checked by central differences.
  for (double x : {-2.0, -0.4, 0.3, 1.7}) {
    auto s = [](double v) { return 1 / std::cosh(v); };
    const double h = 1e-4;
    double fd = (s(x + h) - 2 * s(x) + s(x - h)) / (h * h);
    o.require(std::abs(fd - (s(x) - 2 * std::pow(s(x), 3))) < 1e-6, "sech identity at x = " + fmt(x));
  }
  // With phi_xx = phi - 2 phi^3, theta = t the Hamilton equations give phi_t = 0, theta_t = 1.
  std::map<JetAtom, Expr> ansatz{{F("phi", 2), P("phi - 2*phi^3")},
                                 {F("theta", 1), Expr(0)},
                                 {F("theta", 2), Expr(0)},
                                 {F("phi", 1), Expr(F("phi", 1))}};
  o.require(is_zero(substitute(*r.hamilton_eom(F("phi", 0, 1)), ansatz)), "phi_t = 0 on sech e^{it}");
  o.require(is_zero(substitute(*r.hamilton_eom(F("theta", 0, 1)), ansatz) - 1), "theta_t = 1 on sech e^{it}");

  EvolutionSystem sys = EvolutionSystem::from_report(r);
  o.require(equal_mod_dx(sys.hamiltonian(), P("1/2*Dx(phi)^2 + 1/2*phi^2*Dx(theta)^2 - 1/2*phi^4")),
            "monitored Hamiltonian density");
  Grid g = Grid::make(512, 40.0);
  FieldState init;
  init.fields["phi"] = periodic_sech(g, 20.0);
  init.fields["theta"] = Array(512, 0.0);
  EvolveOptions opt;
  opt.dt = 1e-4;
  opt.t_end = 1.0;
  EvolveResult res = evolve(sys, g, init, opt);
  double secs = seconds_since(t0);
  o.require(res.max_hamiltonian_drift < 1e-6, "Hamiltonian drift " + fmt(res.max_hamiltonian_drift));
  o.require(res.max_mass_drift < 1e-6, "mass drift " + fmt(res.max_mass_drift));
  o.require(secs < 60, "runtime " + fmt(secs) + " s");
  o.summary = "H drift " + fmt(res.max_hamiltonian_drift) + ", mass drift " + fmt(res.max_mass_drift) + ", " +
              std::to_string(res.steps) + " steps in " + fmt(secs) + " s";
  return o;
}

Outcome criterion7() {
  Outcome o;
  EvolutionSystem sys = EvolutionSystem::from_report(builtin("kdv").report);
  const std::string& u = sys.variables().at(0);
  // Travelling wave u(x - 4t) with u'' = 4u + 3u^2, hence u''' = 4u' + 6uu'.
  std::map<JetAtom, Expr> wave{{F(u, 3), normalize(4 * Expr(F(u, 1)) + 6 * Expr(F(u)) * F(u, 1))}};
  o.require(is_zero(substitute(sys.rhs()[0], wave) + 4 * Expr(F(u, 1))), "symbolic residual of the travelling wave");
  for (double x : {-1.5, 0.2, 0.9}) {
    auto f = [](double v) { return -2 / std::pow(std::cosh(v), 2); };
    const double h = 1e-4;
    double fd = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    o.require(std::abs(fd - (4 * f(x) + 3 * f(x) * f(x))) < 1e-5, "profile identity at x = " + fmt(x));
  }
  Grid g = Grid::make(512, 40.0);
  const double x0 = 20.0;
  Array init = periodic_sech(g, x0, 2);
  for (double& v : init) v *= -2;
  FieldState s;
  s.fields[u] = init;
  EvolveOptions opt;
  opt.dt = 1e-4;
  opt.t_end = 1.0;
  EvolveResult res = evolve(sys, g, s, opt);
  const Array& fin = res.state.fields.at(u);
  std::size_t i = static_cast<std::size_t>(std::min_element(fin.begin(), fin.end()) - fin.begin());
  // Parabolic refinement of the sampled trough.
  double a = fin[(i + fin.size() - 1) % fin.size()], b = fin[i], c = fin[(i + 1) % fin.size()];
  double peak = g.x[i] + 0.5 * g.dx() * (a - c) / (a - 2 * b + c);
  double err = std::abs(peak - (x0 + 4.0));
  o.require(err < 2 * g.dx(), "peak error " + fmt(err) + " vs 2dx = " + fmt(2 * g.dx()));
  o.summary = "peak at " + fmt(peak) + ", expected " + fmt(x0 + 4) + ", error " + fmt(err / g.dx()) + " dx";
  return o;
}

// Residual of a consistency bracket after back-substitution, or empty when zero.
std::vector<Expr> back_substitution_residuals(const AnalysisReport& r) {
  Expr h = r.canonical_h;
  for (const auto& c : r.constraints) h = h + Expr(JetAtom::multiplier(c.multiplier)) * c.density;
  std::vector<Expr> out;
  for (const auto& c : r.constraints) {
    Expr res = reduce(r, poisson_with_hamiltonian(c.density, h));
    if (!is_zero(res)) out.push_back(res);
  }
  return out;
}

double soliton_residual(int n) {
  EvolutionSystem sys = EvolutionSystem::from_report(builtin("cubic-nls").report);
  Grid g = Grid::make(n, 40.0);
  Spectral sp(g);
  FieldState s;
  s.fields["phi"] = periodic_sech(g, 20.0);
  s.fields["theta"] = Array(static_cast<std::size_t>(n), 0.3);
  return residual(sys, s, {{"phi", Array(static_cast<std::size_t>(n), 0.0)}, {"theta", Array(static_cast<std::size_t>(n), 1.0)}},
                  sp);
}

Outcome criterion8() {
  Outcome o;
  // Euler operator annihilates total derivatives.
  std::vector<Variable> vars{Variable::field("phi"), Variable::field("theta"), Variable::momentum("phi")};
  DensityGenerator gen(20240, vars, 3);
  int euler_ok = 0;
  for (int i = 0; i < 100; ++i) {
    Expr d = total_dx(gen.density());
    bool ok = true;
    for (const auto& v : vars) ok = ok && is_zero(euler_op(d, v));
    euler_ok += ok;
  }
  o.require(euler_ok == 100, "euler(dx) = 0 on " + std::to_string(euler_ok) + "/100");

  int implicit = 0;
  for (const auto& entry : builtin_corpus()) {
    LagrangianSpec s = parse(entry.lagrangian);
    std::map<JetAtom, Expr> momenta;
    for (const auto& f : s.fields) momenta[JetAtom::momentum(f)] = partial_diff(s.density, F(f, 0, 1));
    for (const auto& c : primary_constraints(s))
      o.require(is_zero(substitute(c.density, momenta)), entry.name + " " + c.label + " under momentum substitution");

    const AnalysisReport& r = builtin(entry.name).report;
    for (const Expr& res : back_substitution_residuals(r)) {
      // Allowed only as the defining condition of an implicitly determined multiplier.
      bool condition = false;
      for (const auto& u : r.undetermined) {
        if (!u.condition) continue;
        Expr cond = reduce(r, *u.condition);
        if (!is_zero(cond) && normalize(res / cond).is_constant()) {
          condition = true;
          o.notes.push_back(entry.name + ": residual is the defining condition of " + u.multiplier);
        }
      }
      implicit += condition;
      o.require(condition, entry.name + " back-substitution residual " + to_string(res));
    }
  }

  // Spectral convergence of the sech soliton residual.
  double prev = soliton_residual(128);
  std::string series = fmt(prev);
  for (int n : {256, 512, 1024}) {
    double cur = soliton_residual(n);
    series += " " + fmt(cur);
    if (prev > 1e-11) o.require(cur <= prev / 10, "spectral decrease at n = " + std::to_string(n));
    else o.require(cur < 1e-11, "spectral floor at n = " + std::to_string(n));
    prev = cur;
  }

  // Fourth-order time stepping on the KdV soliton.
  EvolutionSystem kdv = EvolutionSystem::from_report(builtin("kdv").report);
  Grid g = Grid::make(128, 40.0);
  FieldState s;
  Array u0 = periodic_sech(g, 20.0, 2);
  for (double& v : u0) v *= -2;
  s.fields[kdv.variables()[0]] = u0;
  auto run = [&](double dt) {
    EvolveOptions opt;
    opt.dt = dt;
    opt.t_end = 0.05;
    return evolve(kdv, g, s, opt).state.fields.at(kdv.variables()[0]);
  };
  const double dt = 2e-3;
  Array ref = run(dt / 8), e1 = run(dt), e2 = run(dt / 2);
  double d1 = 0, d2 = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    d1 = std::max(d1, std::abs(e1[i] - ref[i]));
    d2 = std::max(d2, std::abs(e2[i] - ref[i]));
  }
  double ratio = d1 / d2;
  o.require(ratio > 12 && ratio < 20, "dt halving ratio " + fmt(ratio));
  o.summary = "residuals n=128..1024: " + series + "; dt ratio " + fmt(ratio) +
              (implicit ? "; " + std::to_string(implicit) + " implicit-multiplier condition(s)" : "");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"cubic NLS constraints, multipliers and Hamiltonian", criterion1},
    {"cubic and log NLS Hamilton equations", criterion2},
    {"KdV secondary constraint, equations and Hamiltonian", criterion3},
    {"fourth-order NLS constraint closure and equivalence", criterion4},
    {"numeric Lagrangian-oracle verification", criterion5},
    {"cubic NLS soliton conservation", criterion6},
    {"KdV soliton speed", criterion7},
    {"property suite", criterion8},
};

int run_one(std::size_t k) {
  const auto& [title, fn] = kCriteria[k - 1];
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.failures.push_back(std::string("exception: ") + e.what());
  }
  for (const auto& n : o.notes) std::cout << "  note: " << n << "\n";
  for (const auto& f : o.failures) std::cout << "  failed: " << f << "\n";
  std::cout << "criterion " << k << " (" << title << "): " << (o.pass ? "PASS" : "FAIL");
  if (!o.summary.empty()) std::cout << " [" << o.summary << "]";
  std::cout << std::endl;
  return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    std::size_t k = std::strtoul(argv[1], nullptr, 10);
    if (k < 1 || k > kCriteria.size()) {
      std::cerr << "usage: " << argv[0] << " [1-" << kCriteria.size() << "]\n";
      return 2;
    }
    return run_one(k);
  }
  int failed = 0;
  for (std::size_t k = 1; k <= kCriteria.size(); ++k) failed += run_one(k);
  return failed ? 1 : 0;
}
