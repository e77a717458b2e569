#pragma once

#include <map>
#include <string>
#include <vector>

#include "dba/dirac.hpp"

namespace dba::detail {

// Rewrites jets modulo a set of oriented constraints. Rule values are kept
// inter-reduced, so a fixpoint is reached after finitely many passes.
class Reducer {
 public:
  Reducer() = default;
  explicit Reducer(const std::vector<ReductionRule>& rules);

  // pi_f -> value
  void add_momentum_rule(const std::string& field, const RationalFunction& value, const std::string& source);

  // Orients c on the highest jet of the latest-declared field in which it
  // is linear. Returns the pivot coefficient (asserted nonvanishing).
  RationalFunction add_constraint(const RationalFunction& c, const std::vector<std::string>& fields,
                                  const std::string& source);

  RationalFunction reduce(const RationalFunction& e) const;

  std::vector<ReductionRule> rules() const;

 private:
  struct Rule {
    Variable variable;
    int base_order = 0;
    RationalFunction value;
    std::string source;
    mutable std::vector<RationalFunction> derivatives;  // D^j(value)
  };
  std::vector<Rule> rules_;

  const RationalFunction* lookup(const JetAtom& a) const;
  void add_rule(Rule r);
};

// Factors of a pivot that must not vanish: kernels of its monomial content
// and the remaining nonconstant parts of numerator and denominator.
std::vector<RationalFunction> nonvanishing_factors(const RationalFunction& pivot);

// lambda_(k) -> D^k(solution) for every solved multiplier.
RationalFunction substitute_multipliers(const RationalFunction& e,
                                        const std::map<std::string, RationalFunction>& solutions);

bool has_multipliers(const RationalFunction& e);

struct SolveOutcome {
  std::vector<std::pair<std::string, RationalFunction>> solutions;
  std::vector<std::pair<std::string, std::optional<RationalFunction>>> undetermined;
  std::vector<RationalFunction> new_constraints;
  std::vector<RationalFunction> pivots;
  std::vector<std::string> notes;
};

// Solves consistency equations that are linear in multiplier jets.
SolveOutcome solve_multipliers(std::vector<RationalFunction> equations, const std::vector<std::string>& multipliers,
                               const Reducer& reducer);

}  // namespace dba::detail
