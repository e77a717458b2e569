#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dba/corpus.hpp"
#include "dba/dirac.hpp"
#include "dba/expr.hpp"
#include "dba/parser.hpp"
#include "dba/varcalc.hpp"

namespace dba::testing {

inline Expr P(const std::string& text, const std::vector<std::string>& fields = {"phi", "theta"}) {
  return parse_expression(text, fields);
}

inline JetAtom F(const std::string& name, int x = 0, int t = 0) { return JetAtom::field(name, x, t); }

struct Analyzed {
  LagrangianSpec spec;
  AnalysisReport report;
};

// Builtin systems are analyzed once per process.
inline const Analyzed& builtin(const std::string& name) {
  static std::map<std::string, Analyzed> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const CorpusEntry* e = find_builtin(name);
  if (!e) throw std::runtime_error("no builtin " + name);
  Analyzed a;
  a.spec = parse(e->lagrangian);
  a.report = analyze(a.spec);
  return cache.emplace(name, a).first->second;
}

// Random positive value per atom, a pure function of (seed, atom).
class Assignment {
 public:
  explicit Assignment(std::uint64_t seed) : seed_(seed) {}
  double operator()(const JetAtom& a) const {
    std::mt19937_64 rng(seed_ * 0x9e3779b97f4a7c15ULL ^ std::hash<std::string>{}(to_string(a)));
    return std::uniform_real_distribution<double>(0.5, 2.0)(rng);
  }

 private:
  std::uint64_t seed_;
};

inline double eval_at(const Expr& e, std::uint64_t seed) {
  Assignment a(seed);
  return eval(e, [&](const JetAtom& j) { return a(j); });
}

// Random polynomial densities over jets of the given variables.
class DensityGenerator {
 public:
  DensityGenerator(std::uint64_t seed, std::vector<Variable> vars, int max_order = 2)
      : rng_(seed), vars_(std::move(vars)), max_order_(max_order) {}

  Expr atom() {
    std::uniform_int_distribution<std::size_t> v(0, vars_.size() - 1);
    std::uniform_int_distribution<int> k(0, max_order_);
    return Expr(vars_[v(rng_)].jet(k(rng_)));
  }

  Expr coefficient() {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    int n = num(rng_);
    return Expr(mpq_class(n == 0 ? 1 : n, den(rng_)));
  }

  Expr monomial() {
    std::uniform_int_distribution<int> deg(1, 3);
    std::vector<Expr> f{coefficient()};
    for (int i = deg(rng_); i > 0; --i) f.push_back(atom());
    return Expr::product(f);
  }

  Expr density() {
    std::uniform_int_distribution<int> terms(1, 4);
    std::vector<Expr> t;
    for (int i = terms(rng_); i > 0; --i) t.push_back(monomial());
    return Expr::sum(t);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<Variable> vars_;
  int max_order_;
};

}  // namespace dba::testing
