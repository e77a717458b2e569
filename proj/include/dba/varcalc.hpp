#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dba/expr.hpp"
#include "dba/rational.hpp"

namespace dba {

// A dependent variable of the jet space: a field, a momentum (named after its
// field) or a multiplier.
struct Variable {
  AtomKind kind = AtomKind::Field;
  std::string name;

  auto operator<=>(const Variable&) const = default;
  bool operator==(const Variable&) const = default;

  static Variable field(std::string n) { return {AtomKind::Field, std::move(n)}; }
  static Variable momentum(std::string n) { return {AtomKind::Momentum, std::move(n)}; }
  static Variable multiplier(std::string n) { return {AtomKind::Multiplier, std::move(n)}; }

  JetAtom jet(int x = 0, int t = 0) const { return JetAtom{kind, name, x, t}; }
};

std::set<Variable> variables(const Expr& e);
std::set<Variable> variables(const RationalFunction& rf);

Expr total_dx(const Expr& e, int times = 1);
RationalFunction total_dx(const RationalFunction& rf, int times = 1);

// Throws std::invalid_argument if e already contains a time jet.
Expr total_dt(const Expr& e);
RationalFunction total_dt(const RationalFunction& rf);

Expr euler_op(const Expr& e, const Variable& v);
RationalFunction euler_op(const RationalFunction& rf, const Variable& v);

// Equality of integrals on a periodic domain: every Euler operator of a - b
// vanishes. Additive constants are ignored.
bool equal_mod_dx(const Expr& a, const Expr& b);
bool is_exact(const RationalFunction& rf);

// Antiderivative F with D_x F = rf, when rf is exact and the partial
// integrations stay inside the rational-with-log class handled here.
std::optional<RationalFunction> integrate_dx(const RationalFunction& rf);

// Field-theory bracket {c(x), \int H dx} with the sign {f, pi_f} = +1.
// Variational derivatives of H are computed once per field.
class HamiltonianFlow {
 public:
  explicit HamiltonianFlow(const RationalFunction& h);

  RationalFunction bracket(const RationalFunction& c);
  // f_t = dH/dpi_f and (pi_f)_t = -dH/df.
  RationalFunction field_velocity(const std::string& field);
  RationalFunction momentum_velocity(const std::string& field);

 private:
  RationalFunction h_;
  std::map<std::string, std::vector<RationalFunction>> dpi_;  // D^k(dH/dpi_f)
  std::map<std::string, std::vector<RationalFunction>> df_;   // D^k(dH/df)
  const RationalFunction& derivative(std::map<std::string, std::vector<RationalFunction>>& cache,
                                     const Variable& v, int k);
};

Expr poisson_with_hamiltonian(const Expr& c, const Expr& h);

}  // namespace dba
