#include "reducer.hpp"

#include <algorithm>

namespace dba::detail {

Reducer::Reducer(const std::vector<ReductionRule>& rules) {
  for (const auto& r : rules) rules_.push_back(Rule{r.variable, r.base_order, r.value.rational(), r.source, {}});
}

const RationalFunction* Reducer::lookup(const JetAtom& a) const {
  if (a.t_order != 0) return nullptr;
  for (const auto& r : rules_) {
    if (r.variable.kind != a.kind || r.variable.name != a.name || a.x_order < r.base_order) continue;
    auto j = static_cast<std::size_t>(a.x_order - r.base_order);
    if (r.derivatives.empty()) r.derivatives.push_back(r.value);
    while (r.derivatives.size() <= j) r.derivatives.push_back(total_dx(r.derivatives.back()));
    return &r.derivatives[j];
  }
  return nullptr;
}

RationalFunction Reducer::reduce(const RationalFunction& e) const {
  RationalFunction cur = e;
  for (int pass = 0; pass < 64; ++pass) {
    bool hit = false;
    RationalFunction next = evaluate(cur, [&](const JetAtom& a) -> std::optional<RationalFunction> {
      if (const RationalFunction* v = lookup(a)) {
        hit = true;
        return *v;
      }
      return std::nullopt;
    });
    if (!hit) return cur;
    cur = next;
  }
  throw AnalysisError(AnalysisError::Kind::Internal, "constraint reduction did not reach a fixpoint");
}

void Reducer::add_rule(Rule r) {
  r.value = reduce(r.value);
  rules_.push_back(std::move(r));
  // Re-reduce older rule values against the new rule.
  for (std::size_t i = 0; i + 1 < rules_.size(); ++i) {
    Rule& old = rules_[i];
    old.derivatives.clear();
    old.value = reduce(old.value);
    old.derivatives.clear();
  }
}

void Reducer::add_momentum_rule(const std::string& field, const RationalFunction& value, const std::string& source) {
  add_rule(Rule{Variable::momentum(field), 0, value, source, {}});
}

namespace {

bool mentions(const RationalFunction& e, const JetAtom& a) {
  auto js = jet_atoms(e);
  return js.count(a) > 0;
}

}  // namespace

RationalFunction Reducer::add_constraint(const RationalFunction& c, const std::vector<std::string>& fields,
                                         const std::string& source) {
  std::set<JetAtom> js = jet_atoms(c);
  for (auto it = fields.rbegin(); it != fields.rend(); ++it) {
    int top = -1;
    for (const auto& a : js)
      if (a.kind == AtomKind::Field && a.name == *it && a.t_order == 0) top = std::max(top, a.x_order);
    if (top < 0) continue;
    JetAtom pivot = JetAtom::field(*it, top);
    RationalFunction coeff = diff(c, pivot);
    if (coeff.is_zero() || mentions(coeff, pivot)) continue;
    RationalFunction rest = evaluate(c, [&](const JetAtom& a) -> std::optional<RationalFunction> {
      if (a == pivot) return RationalFunction();
      return std::nullopt;
    });
    if (mentions(rest, pivot)) continue;
    add_rule(Rule{Variable::field(*it), top, -rest / coeff, source, {}});
    return coeff;
  }
  throw AnalysisError(AnalysisError::Kind::Unsupported,
                      "cannot orient constraint " + source + ": not linear in any top jet");
}

std::vector<ReductionRule> Reducer::rules() const {
  std::vector<ReductionRule> out;
  for (const auto& r : rules_) out.push_back({r.variable, r.base_order, to_expr(r.value), r.source});
  return out;
}

std::vector<RationalFunction> nonvanishing_factors(const RationalFunction& pivot) {
  std::vector<RationalFunction> out;
  if (pivot.constant_value()) return out;
  const Polynomial& n = pivot.num();
  Monomial content = n.min_monomial();
  for (const auto& [k, e] : content)
    if (e != 0) out.push_back(RationalFunction::kernel(k));
  Polynomial rest = n.times(monomial_inverse(content));
  if (!rest.is_constant()) out.push_back(RationalFunction(rest.monic()));
  if (!pivot.is_polynomial()) out.push_back(RationalFunction(pivot.den()));
  return out;
}

RationalFunction substitute_multipliers(const RationalFunction& e,
                                        const std::map<std::string, RationalFunction>& solutions) {
  if (solutions.empty()) return e;
  std::map<JetAtom, RationalFunction> cache;
  return evaluate(e, [&](const JetAtom& a) -> std::optional<RationalFunction> {
    if (a.kind != AtomKind::Multiplier) return std::nullopt;
    auto it = solutions.find(a.name);
    if (it == solutions.end()) return std::nullopt;
    auto c = cache.find(a);
    if (c != cache.end()) return c->second;
    RationalFunction v = total_dx(it->second, a.x_order);
    cache.emplace(a, v);
    return v;
  });
}

bool has_multipliers(const RationalFunction& e) {
  for (const auto& a : jet_atoms(e))
    if (a.kind == AtomKind::Multiplier) return true;
  return false;
}

}  // namespace dba::detail
