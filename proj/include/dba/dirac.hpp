#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dba/expr.hpp"
#include "dba/parser.hpp"
#include "dba/rational.hpp"
#include "dba/varcalc.hpp"

namespace dba {

class AnalysisError : public std::runtime_error {
 public:
  enum class Kind { Unsupported, NoClosure, Inconsistent, Undetermined, Internal };
  AnalysisError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Constraint {
  std::string label;   // c1, ct1, ctt1, ...
  int generation = 1;  // 1 primary, 2 secondary, ...
  Expr density;
  std::string multiplier;  // lambda1, lambdat1, ...
};

// Rewrites every jet of `variable` of x-order >= base_order:
// v_(base + j) -> D_x^j(value).
struct ReductionRule {
  Variable variable;
  int base_order = 0;
  Expr value;
  std::string source;  // label of the constraint it comes from
};

struct MultiplierCondition {
  std::string multiplier;
  std::optional<Expr> condition;  // = 0; empty for a completely free multiplier
};

struct AnalysisReport {
  std::vector<std::string> fields;
  Expr lagrangian;
  std::vector<std::vector<Expr>> hessian;
  int rank = 0;
  std::vector<Constraint> constraints;
  std::vector<std::pair<std::string, Expr>> multiplier_solution;
  std::vector<MultiplierCondition> undetermined;
  std::vector<Expr> assumptions;  // asserted nonvanishing
  std::vector<std::string> notes;
  std::vector<ReductionRule> reductions;
  Expr canonical_h;
  Expr total_h;
  std::vector<std::pair<JetAtom, Expr>> hamilton_eoms;
  std::vector<std::pair<std::string, Expr>> lagrangian_eoms;  // field -> expression = 0
  int iterations = 0;
  std::optional<bool> cross_check;

  std::optional<Expr> multiplier(const std::string& name) const;
  std::optional<Expr> hamilton_eom(const JetAtom& lhs) const;
};

std::pair<std::vector<std::vector<Expr>>, int> hessian_and_rank(const LagrangianSpec& spec);
std::vector<Constraint> primary_constraints(const LagrangianSpec& spec);
Expr canonical_hamiltonian(const LagrangianSpec& spec);

AnalysisReport run_consistency_loop(const std::vector<std::string>& fields, const Expr& h_l,
                                    std::vector<Constraint> constraints, int max_iter = 10);

// On-shell reduction modulo the report's constraint set.
Expr reduce(const AnalysisReport& report, const Expr& e);

std::vector<std::pair<JetAtom, Expr>> hamilton_eoms(const AnalysisReport& report);
bool cross_check_lagrangian(const LagrangianSpec& spec, const AnalysisReport& report);

// Lagrangian equations euler_op(L, f) with every time jet f_(k,t) replaced
// by D_x^k of the Hamilton right side of f_t.
Expr substitute_time_jets(const AnalysisReport& report, const Expr& e);

// Full pipeline: Hessian, primary constraints, loop, EOMs, cross-check.
AnalysisReport analyze(const LagrangianSpec& spec, int max_iter = 10);

}  // namespace dba
