#include "dba/expr.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "dba/rational.hpp"

namespace dba {

JetAtom JetAtom::field(std::string name, int x, int t) {
  return JetAtom{AtomKind::Field, std::move(name), x, t};
}

JetAtom JetAtom::momentum(std::string field, int x) {
  return JetAtom{AtomKind::Momentum, std::move(field), x, 0};
}

JetAtom JetAtom::multiplier(std::string name, int x) {
  return JetAtom{AtomKind::Multiplier, std::move(name), x, 0};
}

JetAtom JetAtom::with_x(int x) const {
  JetAtom a = *this;
  a.x_order = x;
  return a;
}

JetAtom JetAtom::with_t(int t) const {
  JetAtom a = *this;
  a.t_order = t;
  return a;
}

struct Expr::Node {
  Kind kind = Kind::Constant;
  mpq_class value;
  JetAtom atom;
  std::vector<Expr> children;
  long exponent = 0;
  bool canonical = false;

  mutable std::once_flag once;
  mutable std::shared_ptr<const RationalFunction> rf;
};

Expr::Expr() : Expr(mpq_class(0)) {}
Expr::Expr(int v) : Expr(mpq_class(v)) {}
Expr::Expr(long v) : Expr(mpq_class(v)) {}

Expr::Expr(const mpq_class& q) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = q;
  n->value.canonicalize();
  node_ = std::move(n);
}

Expr::Expr(const JetAtom& a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom = a;
  node_ = std::move(n);
}

Expr Expr::constant(const mpq_class& q) { return Expr(q); }
Expr Expr::atom(const JetAtom& a) { return Expr(a); }

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> kept;
  mpq_class c = 0;
  for (auto& t : terms) {
    if (t.kind() == Kind::Constant)
      c += t.value();
    else
      kept.push_back(std::move(t));
  }
  if (c != 0) kept.push_back(Expr(c));
  if (kept.empty()) return Expr(0);
  if (kept.size() == 1) return kept.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->children = std::move(kept);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> kept;
  mpq_class c = 1;
  for (auto& f : factors) {
    if (f.kind() == Kind::Constant)
      c *= f.value();
    else
      kept.push_back(std::move(f));
  }
  if (c == 0) return Expr(0);
  if (c != 1) kept.insert(kept.begin(), Expr(c));
  if (kept.empty()) return Expr(1);
  if (kept.size() == 1) return kept.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->children = std::move(kept);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(const Expr& base, long exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.kind() == Kind::Constant) {
    if (base.value() == 0) {
      if (exponent < 0) throw std::domain_error("symbolic division by zero");
      return Expr(0);
    }
    mpz_class n = base.value().get_num(), d = base.value().get_den();
    unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), n.get_mpz_t(), e);
    mpz_pow_ui(pd.get_mpz_t(), d.get_mpz_t(), e);
    mpq_class r = exponent > 0 ? mpq_class(pn, pd) : mpq_class(pd, pn);
    r.canonicalize();
    return Expr(r);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->children = {base};
  n->exponent = exponent;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::log(const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Log;
  n->children = {arg};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const mpq_class& Expr::value() const { return node_->value; }
const JetAtom& Expr::atom() const { return node_->atom; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
long Expr::exponent() const { return node_->exponent; }
bool Expr::is_zero_literal() const { return kind() == Kind::Constant && value() == 0; }
bool Expr::is_one_literal() const { return kind() == Kind::Constant && value() == 1; }
bool Expr::is_canonical() const { return node_->canonical; }

std::size_t Expr::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children()) n += c.node_count();
  return n;
}

RationalFunction to_rational_uncached(const Expr& e);

const RationalFunction& Expr::rational() const {
  std::call_once(node_->once, [this] {
    if (!node_->rf) node_->rf = std::make_shared<RationalFunction>(to_rational_uncached(*this));
  });
  return *node_->rf;
}

Expr to_expr_tree(const RationalFunction& rf);

Expr to_expr(const RationalFunction& rf) {
  Expr tree = to_expr_tree(rf);
  // Shallow copy of the top node so the canonical data is never attached to
  // a node shared with other trees.
  auto top = std::make_shared<Expr::Node>();
  top->kind = tree.kind();
  top->value = tree.value();
  top->atom = tree.atom();
  top->children = tree.children();
  top->exponent = tree.exponent();
  top->canonical = true;
  top->rf = std::make_shared<RationalFunction>(rf);
  return Expr(std::shared_ptr<const Expr::Node>(std::move(top)));
}

namespace {

int cmp_q(const mpq_class& a, const mpq_class& b) {
  int c = ::cmp(a, b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return cmp_q(a.value(), b.value());
    case Expr::Kind::Atom: {
      auto c = a.atom() <=> b.atom();
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Expr::Kind::Power:
      if (a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
      [[fallthrough]];
    default: {
      const auto& ca = a.children();
      const auto& cb = b.children();
      for (std::size_t i = 0; i < ca.size() && i < cb.size(); ++i)
        if (int c = compare(ca[i], cb[i])) return c;
      if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
      return 0;
    }
  }
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero_literal()) throw std::domain_error("symbolic division by zero");
  return Expr::product({a, Expr::power(b, -1)});
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(mpq_class(-a.value()));
  return Expr::product({Expr(-1), a});
}

Expr pow(const Expr& base, long exponent) { return Expr::power(base, exponent); }
Expr ln(const Expr& arg) { return Expr::log(arg); }

Expr normalize(const Expr& e) {
  if (e.is_canonical()) return e;
  return to_expr(e.rational());
}

bool is_zero(const Expr& e) { return e.rational().is_zero(); }

bool equivalent(const Expr& a, const Expr& b) { return a.rational() == b.rational(); }

namespace {

void collect_atoms(const Expr& e, std::set<JetAtom>& out) {
  if (e.kind() == Expr::Kind::Atom) {
    out.insert(e.atom());
    return;
  }
  for (const auto& c : e.children()) collect_atoms(c, out);
}

}  // namespace

std::set<JetAtom> atoms(const Expr& e) {
  std::set<JetAtom> out;
  collect_atoms(e, out);
  return out;
}

bool contains_kind(const Expr& e, AtomKind kind) {
  for (const auto& a : atoms(e))
    if (a.kind == kind) return true;
  return false;
}

bool has_time_jets(const Expr& e) {
  for (const auto& a : atoms(e))
    if (a.t_order > 0) return true;
  return false;
}

double eval(const Expr& e, const std::function<double(const JetAtom&)>& value) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.value().get_d();
    case Expr::Kind::Atom:
      return value(e.atom());
    case Expr::Kind::Sum: {
      double s = 0;
      for (const auto& c : e.children()) s += eval(c, value);
      return s;
    }
    case Expr::Kind::Product: {
      double p = 1;
      for (const auto& c : e.children()) p *= eval(c, value);
      return p;
    }
    case Expr::Kind::Power: {
      double b = eval(e.children()[0], value);
      long n = e.exponent();
      double r = 1;
      for (long i = 0; i < (n < 0 ? -n : n); ++i) r *= b;
      return n < 0 ? 1.0 / r : r;
    }
    case Expr::Kind::Log:
      return std::log(eval(e.children()[0], value));
  }
  return 0;
}

Expr partial_diff(const Expr& e, const JetAtom& a) {
  return to_expr(diff(e.rational(), a));
}

Expr substitute(const Expr& e, const std::map<JetAtom, Expr>& bindings) {
  auto rf = evaluate(e.rational(), [&](const JetAtom& a) -> std::optional<RationalFunction> {
    auto it = bindings.find(a);
    if (it == bindings.end()) return std::nullopt;
    return it->second.rational();
  });
  return to_expr(rf);
}

}  // namespace dba
