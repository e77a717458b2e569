#include "dba/dirac.hpp"

#include <algorithm>
#include <map>

#include "reducer.hpp"

namespace dba {

using detail::Reducer;

namespace {

std::string label_for(int generation, int index, const char* stem) {
  return std::string(stem) + std::string(static_cast<std::size_t>(generation - 1), 't') + std::to_string(index);
}

std::map<std::string, RationalFunction> solution_map(const AnalysisReport& r) {
  std::map<std::string, RationalFunction> out;
  for (const auto& [n, v] : r.multiplier_solution) out.emplace(n, v.rational());
  return out;
}

RationalFunction total_with_multipliers(const RationalFunction& h_l, const std::vector<Constraint>& cs) {
  RationalFunction h = h_l;
  for (const auto& c : cs) h = h + RationalFunction::kernel(Kernel::of_atom(JetAtom::multiplier(c.multiplier))) *
                                      c.density.rational();
  return h;
}

void add_assumptions(std::vector<Expr>& out, const RationalFunction& pivot) {
  for (const auto& f : detail::nonvanishing_factors(pivot)) {
    Expr e = to_expr(f);
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
}

}  // namespace

std::optional<Expr> AnalysisReport::multiplier(const std::string& name) const {
  for (const auto& [n, v] : multiplier_solution)
    if (n == name) return v;
  return std::nullopt;
}

std::optional<Expr> AnalysisReport::hamilton_eom(const JetAtom& lhs) const {
  for (const auto& [a, v] : hamilton_eoms)
    if (a == lhs) return v;
  return std::nullopt;
}

std::pair<std::vector<std::vector<Expr>>, int> hessian_and_rank(const LagrangianSpec& spec) {
  const RationalFunction l = spec.density.rational();
  const std::size_t n = spec.fields.size();
  std::vector<std::vector<RationalFunction>> m(n, std::vector<RationalFunction>(n));
  std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    RationalFunction p = diff(l, JetAtom::field(spec.fields[i], 0, 1));
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = diff(p, JetAtom::field(spec.fields[j], 0, 1));
      out[i][j] = to_expr(m[i][j]);
    }
  }
  // Gaussian elimination over the field of rational functions.
  int rank = 0;
  std::vector<bool> used(n, false);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = 0; r < n; ++r)
      if (!used[r] && !m[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv == n) continue;
    used[piv] = true;
    ++rank;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == piv || m[r][col].is_zero()) continue;
      RationalFunction f = m[r][col] / m[piv][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[piv][c];
    }
  }
  return {out, rank};
}

std::vector<Constraint> primary_constraints(const LagrangianSpec& spec) {
  auto [h, rank] = hessian_and_rank(spec);
  if (rank > 0)
    throw AnalysisError(AnalysisError::Kind::Unsupported,
                        "partially regular Lagrangians unsupported (Hessian rank " + std::to_string(rank) + ")");
  const RationalFunction l = spec.density.rational();
  std::vector<Constraint> out;
  int k = 1;
  for (const auto& f : spec.fields) {
    RationalFunction c = RationalFunction::kernel(Kernel::of_atom(JetAtom::momentum(f))) -
                         diff(l, JetAtom::field(f, 0, 1));
    out.push_back({label_for(1, k, "c"), 1, to_expr(c), label_for(1, k, "lambda")});
    ++k;
  }
  return out;
}

Expr canonical_hamiltonian(const LagrangianSpec& spec) {
  const RationalFunction l = spec.density.rational();
  RationalFunction h = -l;
  for (const auto& f : spec.fields) {
    JetAtom v = JetAtom::field(f, 0, 1);
    h = h + diff(l, v) * RationalFunction::kernel(Kernel::of_atom(v));
  }
  for (const auto& a : jet_atoms(h))
    if (a.t_order > 0)
      throw AnalysisError(AnalysisError::Kind::Unsupported, "canonical Hamiltonian depends on velocities");
  return to_expr(h);
}

AnalysisReport run_consistency_loop(const std::vector<std::string>& fields, const Expr& h_l,
                                    std::vector<Constraint> constraints, int max_iter) {
  AnalysisReport report;
  report.fields = fields;
  report.canonical_h = h_l;

  Reducer reducer;
  for (const auto& c : constraints) {
    RationalFunction d = c.density.rational();
    bool oriented = false;
    for (const auto& f : fields) {
      JetAtom pi = JetAtom::momentum(f);
      RationalFunction a = diff(d, pi);
      auto av = a.constant_value();
      if (!av || *av == 0) continue;
      RationalFunction rest = evaluate(d, [&](const JetAtom& x) -> std::optional<RationalFunction> {
        if (x == pi) return RationalFunction();
        return std::nullopt;
      });
      reducer.add_momentum_rule(f, -rest / a, c.label);
      oriented = true;
      break;
    }
    if (!oriented) add_assumptions(report.assumptions, reducer.add_constraint(d, fields, c.label));
  }

  const RationalFunction hl = h_l.rational();
  detail::SolveOutcome outcome;
  for (int sweep = 1;; ++sweep) {
    if (sweep > max_iter)
      throw AnalysisError(AnalysisError::Kind::NoClosure,
                          "no closure after " + std::to_string(max_iter) + " iterations");
    report.iterations = sweep;
    HamiltonianFlow flow(total_with_multipliers(hl, constraints));
    std::vector<RationalFunction> equations, fresh;
    for (const auto& c : constraints) {
      RationalFunction g = reducer.reduce(flow.bracket(c.density.rational()));
      if (g.is_zero()) continue;
      if (detail::has_multipliers(g)) {
        equations.push_back(g);
      } else if (g.constant_value()) {
        throw AnalysisError(AnalysisError::Kind::Inconsistent,
                            "consistency of " + c.label + " reduces to a nonzero constant");
      } else {
        fresh.push_back(g);
      }
    }
    std::vector<std::string> names;
    for (const auto& c : constraints) names.push_back(c.multiplier);
    outcome = detail::solve_multipliers(equations, names, reducer);
    for (const auto& p : outcome.pivots) add_assumptions(report.assumptions, p);
    fresh.insert(fresh.end(), outcome.new_constraints.begin(), outcome.new_constraints.end());

    int generation = sweep + 1, index = 0;
    for (const auto& g : fresh) {
      RationalFunction r = reducer.reduce(g);
      if (r.is_zero()) continue;
      if (r.constant_value())
        throw AnalysisError(AnalysisError::Kind::Inconsistent, "constraint set is inconsistent");
      ++index;
      Constraint c{label_for(generation, index, "c"), generation, to_expr(r), label_for(generation, index, "lambda")};
      add_assumptions(report.assumptions, reducer.add_constraint(r, fields, c.label));
      constraints.push_back(c);
    }
    if (index == 0) break;
  }

  report.constraints = constraints;
  report.reductions = reducer.rules();
  report.notes = outcome.notes;
  std::map<std::string, RationalFunction> known;
  for (const auto& [n, v] : outcome.solutions) {
    report.multiplier_solution.emplace_back(n, to_expr(v));
    known.emplace(n, v);
  }
  for (const auto& [n, cond] : outcome.undetermined) {
    MultiplierCondition mc{n, std::nullopt};
    if (cond) mc.condition = to_expr(*cond);
    report.undetermined.push_back(mc);
  }
  report.total_h = to_expr(detail::substitute_multipliers(total_with_multipliers(hl, constraints), known));
  return report;
}

Expr reduce(const AnalysisReport& report, const Expr& e) {
  Reducer r(report.reductions);
  return to_expr(r.reduce(detail::substitute_multipliers(e.rational(), solution_map(report))));
}

std::vector<std::pair<JetAtom, Expr>> hamilton_eoms(const AnalysisReport& report) {
  std::vector<std::string> free;
  for (const auto& u : report.undetermined)
    if (!u.condition) free.push_back(u.multiplier);
  if (!free.empty()) {
    std::string list;
    for (const auto& f : free) list += (list.empty() ? "" : ", ") + f;
    throw AnalysisError(AnalysisError::Kind::Undetermined, "undetermined multipliers: " + list);
  }
  Reducer r(report.reductions);
  auto known = solution_map(report);
  HamiltonianFlow flow(total_with_multipliers(report.canonical_h.rational(), report.constraints));
  std::vector<std::pair<JetAtom, Expr>> out;
  auto on_shell = [&](const RationalFunction& v) { return to_expr(r.reduce(detail::substitute_multipliers(v, known))); };
  for (const auto& f : report.fields) out.emplace_back(JetAtom::field(f, 0, 1), on_shell(flow.field_velocity(f)));
  for (const auto& f : report.fields)
    out.emplace_back(JetAtom::momentum(f).with_t(1), on_shell(flow.momentum_velocity(f)));
  return out;
}

Expr substitute_time_jets(const AnalysisReport& report, const Expr& e) {
  std::map<std::string, RationalFunction> rhs;
  for (const auto& [a, v] : report.hamilton_eoms)
    if (a.kind == AtomKind::Field) rhs.emplace(a.name, v.rational());
  std::map<JetAtom, RationalFunction> cache;
  RationalFunction out = evaluate(e.rational(), [&](const JetAtom& a) -> std::optional<RationalFunction> {
    if (a.t_order == 0 || a.kind != AtomKind::Field) return std::nullopt;
    if (a.t_order > 1) throw AnalysisError(AnalysisError::Kind::Unsupported, "second time derivative in equation");
    auto it = rhs.find(a.name);
    if (it == rhs.end()) throw AnalysisError(AnalysisError::Kind::Internal, "no Hamilton equation for " + a.name);
    auto c = cache.find(a);
    if (c != cache.end()) return c->second;
    RationalFunction v = total_dx(it->second, a.x_order);
    cache.emplace(a, v);
    return v;
  });
  return to_expr(out);
}

bool cross_check_lagrangian(const LagrangianSpec& spec, const AnalysisReport& report) {
  for (const auto& f : spec.fields) {
    Expr el = euler_op(spec.density, Variable::field(f));
    if (!is_zero(reduce(report, substitute_time_jets(report, el)))) return false;
  }
  return true;
}

AnalysisReport analyze(const LagrangianSpec& spec, int max_iter) {
  auto [hessian, rank] = hessian_and_rank(spec);
  std::vector<Constraint> primaries = primary_constraints(spec);
  AnalysisReport report = run_consistency_loop(spec.fields, canonical_hamiltonian(spec), primaries, max_iter);
  report.lagrangian = spec.density;
  report.hessian = hessian;
  report.rank = rank;
  for (const auto& f : spec.fields) report.lagrangian_eoms.emplace_back(f, euler_op(spec.density, Variable::field(f)));
  bool free_multiplier = std::any_of(report.undetermined.begin(), report.undetermined.end(),
                                     [](const MultiplierCondition& u) { return !u.condition; });
  if (free_multiplier) {
    report.notes.push_back("Hamilton equations not formed: some multipliers are unconstrained");
    return report;
  }
  report.hamilton_eoms = hamilton_eoms(report);
  report.cross_check = cross_check_lagrangian(spec, report);
  return report;
}

}  // namespace dba
