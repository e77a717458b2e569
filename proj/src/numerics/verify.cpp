#include <algorithm>
#include <cmath>
#include <random>

#include "dba/numerics.hpp"

namespace dba {

namespace {

double max_abs(const Array& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// max|a - b| / max(max|a|, max|b|); 0 when both vanish.
double relative_gap(const Array& a, const Array& b) {
  double scale = std::max(max_abs(a), max_abs(b)), gap = 0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  if (scale < 1e-300) return 0.0;
  return gap / scale;
}

void require_multiplier_free(const Expr& e, const std::string& what) {
  for (const auto& a : atoms(e))
    if (a.kind == AtomKind::Multiplier)
      throw NumericError(what + " depends on the unsolved multiplier " + a.name);
}

// 1.5 + 0.9 * p / max|p| with p a random trigonometric polynomial of
// degree 6, so samples stay in [0.6, 2.4].
Array random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Array p(static_cast<std::size_t>(g.n), 0.0);
  for (int k = 1; k <= 6; ++k) {
    double a = normal(rng) / k, b = normal(rng) / k;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double w = 2 * M_PI * k * g.x[i] / g.length;
      p[i] += a * std::cos(w) + b * std::sin(w);
    }
  }
  double m = max_abs(p);
  for (double& v : p) v = 1.5 + 0.9 * v / m;
  return p;
}

struct Comparison {
  std::string label;
  Evaluator lhs, rhs;
};

}  // namespace

EquivalenceResult check_eom_equivalence(const LagrangianSpec& spec, const AnalysisReport& report, const Grid& g,
                                        std::uint64_t seed, double tol, const ReferenceSystem* reference,
                                        int samples) {
  if (report.hamilton_eoms.empty()) throw NumericError("report has no Hamilton equations");
  std::vector<Comparison> cmp;
  for (const auto& f : spec.fields) {
    const RationalFunction e = euler_op(spec.density, Variable::field(f)).rational();
    RationalFunction rest = evaluate(e, [](const JetAtom& a) -> std::optional<RationalFunction> {
      if (a.t_order > 0) return RationalFunction();
      return std::nullopt;
    });
    Expr time_part = reduce(report, substitute_time_jets(report, to_expr(e - rest)));
    Expr remainder = reduce(report, -to_expr(rest));
    require_multiplier_free(time_part, "Lagrangian equation for " + f);
    require_multiplier_free(remainder, "Lagrangian equation for " + f);
    cmp.push_back({"lagrangian equation for " + f, Evaluator(time_part, g), Evaluator(remainder, g)});
  }
  if (reference) {
    for (const auto& eq : reference->equations) {
      auto h = report.hamilton_eom(JetAtom::field(eq.field, 0, 1));
      if (!h) throw NumericError("no Hamilton equation for " + eq.field);
      require_multiplier_free(*h, "Hamilton equation for " + eq.field);
      cmp.push_back({"reference equation for " + eq.field, Evaluator(*h, g), Evaluator(reduce(report, eq.rhs), g)});
    }
  }
  std::vector<Evaluator> assumptions;
  for (const auto& a : report.assumptions) assumptions.emplace_back(a, g);

  Spectral sp(g);
  std::mt19937_64 rng(seed);
  EquivalenceResult out;
  out.seed = seed;
  for (const auto& c : cmp) out.per_equation.emplace_back(c.label, 0.0);
  for (int s = 0; s < samples; ++s) {
    FieldState state;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      for (const auto& f : report.fields) state.fields[f] = random_field(g, rng);
      ok = true;
      for (const auto& a : assumptions) {
        Array v = a(state, sp);
        if (std::any_of(v.begin(), v.end(), [](double x) { return std::abs(x) < 1e-6; })) ok = false;
      }
    }
    if (!ok) throw NumericError("could not sample fields satisfying the assumptions after 10 attempts");
    for (std::size_t k = 0; k < cmp.size(); ++k) {
      double r = relative_gap(cmp[k].lhs(state, sp), cmp[k].rhs(state, sp));
      out.per_equation[k].second = std::max(out.per_equation[k].second, r);
      out.max_rel_error = std::max(out.max_rel_error, r);
    }
    ++out.samples;
  }
  out.passed = out.max_rel_error < tol;
  return out;
}

}  // namespace dba
