#include "dba/varcalc.hpp"

#include <stdexcept>

namespace dba {

namespace {

void collect_variables(const RationalFunction& rf, std::set<Variable>& out) {
  for (Kernel k : rf.kernels()) {
    if (k.is_atom())
      out.insert(Variable{k.atom().kind, k.atom().name});
    else
      collect_variables(k.log_argument().rational(), out);
  }
}

// Kernel-level derivative for D_x.
RationalFunction dx_kernel(Kernel k) {
  if (k.is_atom()) {
    const JetAtom& a = k.atom();
    return RationalFunction::kernel(Kernel::of_atom(a.with_x(a.x_order + 1)));
  }
  const RationalFunction& arg = k.log_argument().rational();
  return total_dx(arg) / arg;
}

RationalFunction dt_kernel(Kernel k) {
  if (k.is_atom()) {
    const JetAtom& a = k.atom();
    if (a.kind == AtomKind::Multiplier) return RationalFunction();
    return RationalFunction::kernel(Kernel::of_atom(a.with_t(a.t_order + 1)));
  }
  const RationalFunction& arg = k.log_argument().rational();
  return total_dt(arg) / arg;
}

bool rf_has_time_jets(const RationalFunction& rf) {
  for (Kernel k : rf.kernels()) {
    if (k.is_atom()) {
      if (k.atom().t_order > 0) return true;
    } else if (rf_has_time_jets(k.log_argument().rational())) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::set<Variable> variables(const RationalFunction& rf) {
  std::set<Variable> out;
  collect_variables(rf, out);
  return out;
}

std::set<Variable> variables(const Expr& e) { return variables(e.rational()); }

RationalFunction total_dx(const RationalFunction& rf, int times) {
  RationalFunction r = rf;
  for (int i = 0; i < times; ++i) r = derive(r, dx_kernel);
  return r;
}

Expr total_dx(const Expr& e, int times) { return to_expr(total_dx(e.rational(), times)); }

RationalFunction total_dt(const RationalFunction& rf) {
  if (rf_has_time_jets(rf)) throw std::invalid_argument("total_dt: input already contains a time jet");
  return derive(rf, dt_kernel);
}

Expr total_dt(const Expr& e) { return to_expr(total_dt(e.rational())); }

RationalFunction euler_op(const RationalFunction& rf, const Variable& v) {
  RationalFunction result;
  for (const JetAtom& a : jet_atoms(rf)) {
    if (a.kind != v.kind || a.name != v.name) continue;
    RationalFunction p = diff(rf, a);
    if (p.is_zero()) continue;
    if (a.t_order > 0) {
      if (rf_has_time_jets(p)) throw std::invalid_argument("euler_op: second-order time dependence");
      p = -total_dt(p);
    }
    if (a.x_order % 2 == 1) p = -p;
    result = result + total_dx(p, a.x_order);
  }
  return result;
}

Expr euler_op(const Expr& e, const Variable& v) { return to_expr(euler_op(e.rational(), v)); }

bool is_exact(const RationalFunction& rf) {
  for (const Variable& v : variables(rf))
    if (!euler_op(rf, v).is_zero()) return false;
  return true;
}

bool equal_mod_dx(const Expr& a, const Expr& b) { return is_exact(a.rational() - b.rational()); }

namespace {

struct Jet {
  Kernel kernel;
  int order;
};

// Highest x-order jet among the atoms of rf (ties: larger kernel wins).
std::optional<Jet> top_jet(const RationalFunction& rf) {
  std::optional<Jet> best;
  for (Kernel k : rf.kernels()) {
    if (!k.is_atom()) continue;
    int o = k.atom().x_order;
    if (!best || o > best->order || (o == best->order && best->kernel < k)) best = Jet{k, o};
  }
  return best;
}

bool depends_on(const RationalFunction& rf, Kernel v) {
  for (Kernel k : rf.kernels()) {
    if (k == v) return true;
    if (!k.is_atom() && depends_on(k.log_argument().rational(), v)) return true;
  }
  return false;
}

// Integral of rf with respect to the kernel v, other kernels constant.
// Handles denominators free of v and no logarithm depending on v.
std::optional<RationalFunction> integrate_in(const RationalFunction& rf, Kernel v) {
  if (depends_on(RationalFunction(rf.den()), v)) return std::nullopt;
  for (Kernel k : rf.num().kernels())
    if (!k.is_atom() && depends_on(k.log_argument().rational(), v)) return std::nullopt;
  RationalFunction acc;
  for (const auto& [e, c] : rf.num().coefficients(v)) {
    RationalFunction coeff(c);
    if (e == -1)
      acc = acc + coeff * log_of(RationalFunction::kernel(v));
    else {
      mpq_class scale(1, e + 1);
      scale.canonicalize();
      acc = acc + coeff * RationalFunction(Polynomial::variable(v, e + 1)) * RationalFunction(scale);
    }
  }
  return acc / RationalFunction(rf.den());
}

}  // namespace

std::optional<RationalFunction> integrate_dx(const RationalFunction& rf) {
  RationalFunction rest = rf;
  RationalFunction primitive;
  // Each step removes the top jet; bound the loop defensively.
  for (int guard = 0; guard < 256; ++guard) {
    if (rest.is_zero()) return primitive;
    auto top = top_jet(rest);
    if (!top || top->order == 0) return std::nullopt;
    Kernel vn = top->kernel;
    RationalFunction a = diff(rest, vn.atom());
    if (depends_on(a, vn)) return std::nullopt;
    Kernel below = Kernel::of_atom(vn.atom().with_x(top->order - 1));
    auto g = integrate_in(a, below);
    if (!g) return std::nullopt;
    primitive = primitive + *g;
    rest = rest - total_dx(*g);
  }
  return std::nullopt;
}

HamiltonianFlow::HamiltonianFlow(const RationalFunction& h) : h_(h) {}

const RationalFunction& HamiltonianFlow::derivative(std::map<std::string, std::vector<RationalFunction>>& cache,
                                                    const Variable& v, int k) {
  auto& list = cache[v.name];
  if (list.empty()) list.push_back(euler_op(h_, v));
  while (static_cast<int>(list.size()) <= k) list.push_back(total_dx(list.back()));
  return list[static_cast<std::size_t>(k)];
}

RationalFunction HamiltonianFlow::bracket(const RationalFunction& c) {
  RationalFunction result;
  for (const JetAtom& a : jet_atoms(c)) {
    if (a.kind == AtomKind::Multiplier) continue;
    if (a.t_order > 0) throw std::invalid_argument("bracket: time jet in constraint");
    RationalFunction dc = diff(c, a);
    if (dc.is_zero()) continue;
    if (a.kind == AtomKind::Field)
      result = result + dc * derivative(dpi_, Variable::momentum(a.name), a.x_order);
    else
      result = result - dc * derivative(df_, Variable::field(a.name), a.x_order);
  }
  return result;
}

RationalFunction HamiltonianFlow::field_velocity(const std::string& field) {
  return derivative(dpi_, Variable::momentum(field), 0);
}

RationalFunction HamiltonianFlow::momentum_velocity(const std::string& field) {
  return -derivative(df_, Variable::field(field), 0);
}

Expr poisson_with_hamiltonian(const Expr& c, const Expr& h) {
  HamiltonianFlow flow(h.rational());
  return to_expr(flow.bracket(c.rational()));
}

}  // namespace dba
