#pragma once

#include <gmpxx.h>

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace dba {

enum class AtomKind { Field, Momentum, Multiplier };

// A jet coordinate. Momenta are named after their field; multipliers carry
// their own name (lambda1, lambdat1, ...). Order of members fixes the
// canonical atom order.
struct JetAtom {
  AtomKind kind = AtomKind::Field;
  std::string name;
  int x_order = 0;
  int t_order = 0;

  auto operator<=>(const JetAtom&) const = default;
  bool operator==(const JetAtom&) const = default;

  static JetAtom field(std::string name, int x = 0, int t = 0);
  static JetAtom momentum(std::string field, int x = 0);
  static JetAtom multiplier(std::string name, int x = 0);

  JetAtom with_x(int x) const;
  JetAtom with_t(int t) const;
};

class RationalFunction;

// Immutable expression tree with shared nodes. Operators build raw trees
// (with trivial constant folding); normalize() produces the canonical form.
class Expr {
 public:
  enum class Kind { Constant, Atom, Sum, Product, Power, Log };

  Expr();
  Expr(int v);
  Expr(long v);
  Expr(const mpq_class& q);
  Expr(const JetAtom& a);

  static Expr constant(const mpq_class& q);
  static Expr atom(const JetAtom& a);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, long exponent);
  static Expr log(const Expr& arg);

  Kind kind() const;
  const mpq_class& value() const;
  const JetAtom& atom() const;
  const std::vector<Expr>& children() const;
  long exponent() const;

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero_literal() const;
  bool is_one_literal() const;

  // True for trees produced by normalize().
  bool is_canonical() const;

  // Canonical rational function of this expression, computed once per node.
  const RationalFunction& rational() const;

  std::size_t node_count() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr to_expr(const RationalFunction& rf);
};

// Total structural order (kind, then contents).
int compare(const Expr& a, const Expr& b);
inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, long exponent);
Expr ln(const Expr& arg);

Expr normalize(const Expr& e);
bool is_zero(const Expr& e);
bool equivalent(const Expr& a, const Expr& b);

Expr partial_diff(const Expr& e, const JetAtom& a);
Expr substitute(const Expr& e, const std::map<JetAtom, Expr>& bindings);

// Atoms occurring anywhere in e, including inside logarithms.
std::set<JetAtom> atoms(const Expr& e);
bool contains_kind(const Expr& e, AtomKind kind);
bool has_time_jets(const Expr& e);

double eval(const Expr& e, const std::function<double(const JetAtom&)>& value);

// Rendering.
std::string to_string(const JetAtom& a);
std::string to_latex(const JetAtom& a);
// Multiplier and constraint labels: lambdat1 -> \tilde{\lambda}_{1}.
std::string latex_label(const std::string& name);
std::string to_string(const Expr& e);
std::string to_latex(const Expr& e);
// Text in the parser's input syntax (Dx/Dt forms), re-parseable.
std::string to_source(const Expr& e);

}  // namespace dba
