#include <algorithm>
#include <cmath>

#include "dba/numerics.hpp"

namespace dba {

namespace {

bool mentions_jet(const Expr& e, const JetAtom& a) { return atoms(e).count(a) > 0; }

int max_x_order(const Expr& e) {
  int m = 0;
  for (const auto& a : atoms(e)) m = std::max(m, a.x_order);
  return m;
}

}  // namespace

EvolutionSystem EvolutionSystem::from_report(const AnalysisReport& r) {
  if (r.hamilton_eoms.empty()) throw NumericError("report has no Hamilton equations");
  EvolutionSystem s;
  s.report_ = r;
  std::vector<std::string> fields;
  for (const auto& f : r.fields) {
    bool eliminated = std::any_of(r.reductions.begin(), r.reductions.end(), [&](const ReductionRule& rule) {
      return rule.variable == Variable::field(f) && rule.base_order == 0;
    });
    if (!eliminated) fields.push_back(f);
  }
  std::vector<Expr> rhs;
  for (const auto& f : fields) {
    auto e = r.hamilton_eom(JetAtom::field(f, 0, 1));
    if (!e) throw NumericError("no Hamilton equation for " + f);
    for (const auto& a : atoms(*e))
      if (a.kind == AtomKind::Multiplier)
        throw NumericError("cannot evolve: " + f + "_t depends on the unsolved multiplier " + a.name);
    rhs.push_back(*e);
  }
  Expr h = reduce(r, r.total_h);
  for (const auto& a : atoms(h))
    if (a.kind != AtomKind::Field) throw NumericError("Hamiltonian keeps " + to_string(a) + " after reduction");

  if (fields.size() == 1 && !mentions_jet(rhs[0], JetAtom::field(fields[0]))) {
    // Translation-invariant single field: evolve u = -f_x.
    std::string u = "u";
    while (std::find(r.fields.begin(), r.fields.end(), u) != r.fields.end()) u += "_";
    s.potential_ = fields[0];
    s.vars_ = {u};
    s.rhs_ = {normalize(s.translate(-total_dx(rhs[0])))};
    s.h_ = s.translate(h);
    return s;
  }
  s.vars_ = fields;
  s.rhs_ = rhs;
  s.h_ = h;
  if (fields.size() == 2) {
    JetAtom amp = JetAtom::field(fields[0]), phase = JetAtom::field(fields[1]);
    bool amp_nonzero = std::any_of(r.assumptions.begin(), r.assumptions.end(),
                                   [&](const Expr& a) { return a == Expr(amp); });
    bool phase_free = !mentions_jet(rhs[0], phase) && !mentions_jet(rhs[1], phase) && !mentions_jet(h, phase);
    s.polar_ = amp_nonzero && phase_free;
  }
  return s;
}

Expr EvolutionSystem::translate(const Expr& e) const {
  if (!potential_) return e;
  std::map<JetAtom, Expr> bind;
  for (const auto& a : atoms(e)) {
    if (a.kind != AtomKind::Field || a.name != *potential_) continue;
    if (a.x_order == 0 || a.t_order != 0)
      throw NumericError("expression depends on " + to_string(a) + ", not expressible through u = -" + *potential_ +
                         "_x");
    bind.emplace(a, -Expr(JetAtom::field(vars_[0], a.x_order - 1)));
  }
  return normalize(substitute(e, bind));
}

int EvolutionSystem::max_order() const {
  int m = max_x_order(h_);
  for (const auto& e : rhs_) m = std::max(m, max_x_order(e));
  return m;
}

namespace {

struct Compiled {
  const EvolutionSystem& sys;
  const Spectral& sp;
  bool dealias;
  std::vector<Evaluator> rhs;
  Evaluator h;
  std::vector<Evaluator> extra;
  std::vector<JetAtom> needed;

  Compiled(const EvolutionSystem& s, const Spectral& sp_, bool d, const std::vector<std::pair<std::string, Expr>>& ex)
      : sys(s), sp(sp_), dealias(d), h(s.hamiltonian(), sp_.grid()) {
    for (const auto& e : s.rhs()) rhs.emplace_back(e, sp.grid());
    for (const auto& [name, e] : ex) extra.emplace_back(e, sp.grid());
    std::set<JetAtom> all;
    for (const auto& e : rhs) all.insert(e.atoms().begin(), e.atoms().end());
    all.insert(h.atoms().begin(), h.atoms().end());
    for (const auto& e : extra) all.insert(e.atoms().begin(), e.atoms().end());
    needed.assign(all.begin(), all.end());
  }

  JetTable jets(const FieldState& st, bool filtered) const {
    if (sys.polar()) {
      const auto& v = sys.variables();
      return polar_jets(st.fields.at(v[0]), st.fields.at(v[1]), v[0], v[1], sys.max_order(), sp);
    }
    return spectral_jets(st, needed, sp, filtered);
  }

  std::vector<Array> velocity(const FieldState& st) const {
    JetTable j = jets(st, dealias);
    std::vector<Array> out;
    for (const auto& e : rhs) out.push_back(e(j, dealias ? &sp : nullptr));
    return out;
  }

  MonitorSample monitor(const FieldState& st) const {
    JetTable j = jets(st, false);
    MonitorSample m;
    m.t = st.time;
    const Array& first = st.fields.at(sys.variables()[0]);
    Array sq(first.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = first[i] * first[i];
    m.mass = integrate(sq, sp.grid());
    m.hamiltonian = integrate(h(j), sp.grid());
    for (const auto& e : extra) m.extra.push_back(integrate(e(j), sp.grid()));
    return m;
  }
};

double drift(double v, double v0) { return std::abs(v0) > 1e-300 ? std::abs(v - v0) / std::abs(v0) : std::abs(v - v0); }

void check_state(const EvolutionSystem& sys, const FieldState& st, long step) {
  for (const auto& [name, a] : st.fields)
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!std::isfinite(a[i]) || std::abs(a[i]) > 1e100)
        throw NumericError("instability at step " + std::to_string(step) + " (t = " + std::to_string(st.time) +
                           "): " + name + " non-finite or overflowing at index " + std::to_string(i));
  if (sys.polar()) {
    const Array& amp = st.fields.at(sys.variables()[0]);
    for (std::size_t i = 0; i < amp.size(); ++i)
      if (!(amp[i] > 0.0))
        throw NumericError("amplitude " + sys.variables()[0] + " reaches zero at step " + std::to_string(step) +
                           ", index " + std::to_string(i) + ": the phase is undefined there");
  }
}

}  // namespace

std::vector<Array> evaluate_rhs(const EvolutionSystem& sys, const FieldState& s, const Spectral& sp, bool dealias) {
  return Compiled(sys, sp, dealias, {}).velocity(s);
}

double residual(const EvolutionSystem& sys, const FieldState& s, const std::map<std::string, Array>& time_derivative,
                const Spectral& sp) {
  double worst = 0;
  for (std::size_t k = 0; k < sys.variables().size(); ++k) {
    const std::string& v = sys.variables()[k];
    const RationalFunction& rf = sys.rhs()[k].rational();
    JetAtom vt = JetAtom::field(v, 0, 1);
    // (v_t * den - num) times the monomial clearing negative exponents
    Polynomial p = Polynomial::term({{Kernel::of_atom(vt), 1}}, 1) * rf.den() - rf.num();
    Monomial clear;
    for (const auto& [k, e] : p.min_monomial())
      if (e < 0) clear.emplace_back(k, -e);
    Expr cleared = to_expr(RationalFunction(p.times(clear)));
    Evaluator ev(cleared, sp.grid());
    std::vector<JetAtom> spatial;
    for (const auto& a : ev.atoms())
      if (a.t_order == 0) spatial.push_back(a);
    JetTable j = spectral_jets(s, spatial, sp);
    auto it = time_derivative.find(v);
    if (it == time_derivative.end()) throw NumericError("no time derivative for " + v);
    j.emplace(vt, it->second);
    for (double x : ev(j)) worst = std::max(worst, std::abs(x));
  }
  return worst;
}

EvolveResult evolve(const EvolutionSystem& sys, const Grid& g, FieldState init, const EvolveOptions& opt) {
  if (!(opt.dt > 0) || !(opt.t_end >= 0)) throw NumericError("dt must be positive and t_end nonnegative");
  Spectral sp(g);
  bool dealias = opt.dealias.value_or(!sys.polar());
  Compiled c(sys, sp, dealias, opt.extra_monitors);
  for (const auto& v : sys.variables()) {
    auto it = init.fields.find(v);
    if (it == init.fields.end()) throw NumericError("initial data lacks " + v);
    if (static_cast<int>(it->second.size()) != g.n) throw NumericError("initial data for " + v + " has wrong length");
  }
  check_state(sys, init, 0);

  EvolveResult res;
  const long steps = std::max(1L, std::lround(opt.t_end / opt.dt));
  const double dt = opt.t_end / static_cast<double>(steps);
  FieldState y = init;

  if (opt.csv) {
    *opt.csv << "t,mass,hamiltonian";
    for (const auto& [name, e] : opt.extra_monitors) *opt.csv << "," << name;
    *opt.csv << "\n";
  }
  auto record = [&](const MonitorSample& m, bool force) {
    res.monitors.push_back(m);
    const MonitorSample& m0 = res.monitors.front();
    res.max_mass_drift = std::max(res.max_mass_drift, drift(m.mass, m0.mass));
    res.max_hamiltonian_drift = std::max(res.max_hamiltonian_drift, drift(m.hamiltonian, m0.hamiltonian));
    res.max_extra_drift.resize(m.extra.size(), 0.0);
    for (std::size_t i = 0; i < m.extra.size(); ++i)
      res.max_extra_drift[i] = std::max(res.max_extra_drift[i], drift(m.extra[i], m0.extra[i]));
    if (opt.csv && (force || (res.monitors.size() - 1) % static_cast<std::size_t>(std::max(1, opt.csv_every)) == 0)) {
      *opt.csv << m.t << "," << m.mass << "," << m.hamiltonian;
      for (double e : m.extra) *opt.csv << "," << e;
      *opt.csv << "\n";
    }
  };
  record(c.monitor(y), false);

  const auto& vars = sys.variables();
  auto shifted = [&](const FieldState& base, const std::vector<Array>& k, double h) {
    FieldState s = base;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      Array& a = s.fields[vars[v]];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += h * k[v][i];
    }
    s.time = base.time + h;
    return s;
  };
  for (long step = 1; step <= steps; ++step) {
    try {
      auto k1 = c.velocity(y);
      auto k2 = c.velocity(shifted(y, k1, dt / 2));
      auto k3 = c.velocity(shifted(y, k2, dt / 2));
      auto k4 = c.velocity(shifted(y, k3, dt));
      for (std::size_t v = 0; v < vars.size(); ++v) {
        Array& a = y.fields[vars[v]];
        for (std::size_t i = 0; i < a.size(); ++i)
          a[i] += dt / 6 * (k1[v][i] + 2 * k2[v][i] + 2 * k3[v][i] + k4[v][i]);
      }
    } catch (const NumericError& e) {
      throw NumericError("instability at step " + std::to_string(step) + ": " + e.what());
    }
    y.time = init.time + dt * static_cast<double>(step);
    check_state(sys, y, step);
    record(c.monitor(y), step == steps);
    res.steps = step;
  }
  res.state = y;
  return res;
}

}  // namespace dba
