#include <algorithm>
#include <map>
#include <set>

#include "reducer.hpp"

namespace dba::detail {

namespace {

// Multiplier name -> highest x-order present.
std::map<std::string, int> multiplier_orders(const RationalFunction& e) {
  std::map<std::string, int> out;
  for (const auto& a : jet_atoms(e)) {
    if (a.kind != AtomKind::Multiplier) continue;
    auto [it, fresh] = out.emplace(a.name, a.x_order);
    if (!fresh) it->second = std::max(it->second, a.x_order);
  }
  return out;
}

void require_linear(const RationalFunction& e) {
  std::set<Kernel> mult;
  for (Kernel k : e.kernels()) {
    if (!k.is_atom()) {
      for (const auto& a : jet_atoms(RationalFunction::kernel(k)))
        if (a.kind == AtomKind::Multiplier)
          throw AnalysisError(AnalysisError::Kind::Unsupported, "multiplier inside a logarithm");
      continue;
    }
    if (k.atom().kind == AtomKind::Multiplier) mult.insert(k);
  }
  for (Kernel k : mult)
    if (e.den().contains(k))
      throw AnalysisError(AnalysisError::Kind::Unsupported, "consistency condition nonlinear in multipliers");
  for (const auto& [m, c] : e.num().terms()) {
    int deg = 0;
    for (const auto& [k, p] : m)
      if (mult.count(k)) deg += p;
    if (deg > 1 || deg < 0)
      throw AnalysisError(AnalysisError::Kind::Unsupported, "consistency condition nonlinear in multipliers");
  }
}

RationalFunction zero_multiplier(const RationalFunction& e, const std::string& name) {
  return evaluate(e, [&](const JetAtom& a) -> std::optional<RationalFunction> {
    if (a.kind == AtomKind::Multiplier && a.name == name) return RationalFunction();
    return std::nullopt;
  });
}

}  // namespace

SolveOutcome solve_multipliers(std::vector<RationalFunction> equations, const std::vector<std::string>& multipliers,
                               const Reducer& reducer) {
  SolveOutcome out;
  std::map<std::string, RationalFunction> known;
  auto rank = [&](const std::string& name) {
    return std::find(multipliers.begin(), multipliers.end(), name) - multipliers.begin();
  };
  auto record = [&](const std::string& name, const RationalFunction& value) {
    std::map<std::string, RationalFunction> one{{name, value}};
    for (auto& [n, v] : out.solutions) v = reducer.reduce(substitute_multipliers(v, one));
    for (auto& [n, v] : known) v = reducer.reduce(substitute_multipliers(v, one));
    out.solutions.emplace_back(name, value);
    known.emplace(name, value);
  };

  for (;;) {
    std::vector<RationalFunction> live;
    for (const auto& eq : equations) {
      RationalFunction r = reducer.reduce(substitute_multipliers(eq, known));
      if (r.is_zero()) continue;
      if (!has_multipliers(r)) {
        if (r.constant_value())
          throw AnalysisError(AnalysisError::Kind::Inconsistent,
                              "consistency condition reduces to a nonzero constant");
        out.new_constraints.push_back(r);
        continue;
      }
      require_linear(r);
      live.push_back(r);
    }
    equations = live;
    if (equations.empty()) break;

    std::vector<std::size_t> order(equations.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return multiplier_orders(equations[a]).size() < multiplier_orders(equations[b]).size();
    });

    bool progress = false;
    for (std::size_t idx : order) {
      const RationalFunction eq = equations[idx];
      auto orders = multiplier_orders(eq);
      std::vector<std::string> names;
      for (const auto& [n, o] : orders) names.push_back(n);
      std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });

      for (const auto& name : names) {
        if (orders[name] != 0) continue;
        JetAtom m = JetAtom::multiplier(name);
        RationalFunction a = diff(eq, m);
        RationalFunction b = evaluate(eq, [&](const JetAtom& x) -> std::optional<RationalFunction> {
          if (x == m) return RationalFunction();
          return std::nullopt;
        });
        out.pivots.push_back(a);
        record(name, reducer.reduce(-b / a));
        equations.erase(equations.begin() + static_cast<std::ptrdiff_t>(idx));
        progress = true;
        break;
      }
      if (progress) break;

      if (is_exact(eq)) {
        if (auto f = integrate_dx(eq)) {
          equations[idx] = *f;
          out.notes.push_back("integrated an exact consistency condition in " + names.front() +
                              "; the constant of integration is set to zero");
          progress = true;
          break;
        }
      }
      if (names.size() == 1 && zero_multiplier(eq, names.front()).is_zero()) {
        out.notes.push_back("homogeneous condition on " + names.front() + "; the solution " + names.front() +
                            " = 0 is chosen");
        record(names.front(), RationalFunction());
        equations.erase(equations.begin() + static_cast<std::ptrdiff_t>(idx));
        progress = true;
        break;
      }
    }
    if (!progress) break;
  }

  std::set<std::string> covered;
  for (const auto& [n, v] : out.solutions) covered.insert(n);
  for (const auto& eq : equations) {
    auto orders = multiplier_orders(eq);
    std::vector<std::string> names;
    for (const auto& [n, o] : orders)
      if (!covered.count(n)) names.push_back(n);
    if (names.empty()) continue;
    std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    out.undetermined.emplace_back(names.front(), eq);
    covered.insert(names.front());
  }
  for (const auto& name : multipliers)
    if (!covered.count(name)) out.undetermined.emplace_back(name, std::nullopt);
  std::sort(out.undetermined.begin(), out.undetermined.end(),
            [&](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
  return out;
}

}  // namespace dba::detail
