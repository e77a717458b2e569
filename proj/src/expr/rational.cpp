#include <map>
#include <stdexcept>

#include "dba/rational.hpp"

namespace dba {

RationalFunction RationalFunction::make(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw std::domain_error("symbolic division by zero");
  RationalFunction r;
  if (num.is_zero()) return r;

  Monomial md_inv = monomial_inverse(den.min_monomial());
  Polynomial d = den.times(md_inv);
  Polynomial n = num.times(md_inv);
  if (auto c = d.constant_value()) {
    r.num_ = n * mpq_class(1 / *c);
    return r;
  }

  // gcd works on nonnegative exponents; shift the numerator temporarily.
  Monomial shift;
  for (const auto& [k, e] : n.min_monomial())
    if (e < 0) shift.emplace_back(k, -e);
  Polynomial n0 = n.times(shift);
  Polynomial g = gcd(n0, d);
  if (!g.is_constant()) {
    n = divide_exact(n0, g).times(monomial_inverse(shift));
    d = divide_exact(d, g);
  }
  mpq_class lc_inv = 1 / d.leading_coefficient();
  r.num_ = n * lc_inv;
  r.den_ = d * lc_inv;
  return r;
}

std::optional<mpq_class> RationalFunction::constant_value() const {
  if (!den_.is_one()) return std::nullopt;
  return num_.constant_value();
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (is_polynomial() && o.is_polynomial()) return RationalFunction(num_ + o.num_);
  if (den_ == o.den_) return make(num_ + o.num_, den_);
  if (o.is_polynomial()) return make(num_ + o.num_ * den_, den_);
  if (is_polynomial()) return make(num_ * o.den_ + o.num_, o.den_);
  Polynomial g = gcd(den_, o.den_);
  if (g.is_constant()) return make(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  Polynomial a = divide_exact(den_, g);
  Polynomial b = divide_exact(o.den_, g);
  return make(num_ * b + o.num_ * a, a * o.den_);
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const { return *this + (-o); }

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  if (is_zero() || o.is_zero()) return RationalFunction();
  if (is_polynomial() && o.is_polynomial()) return RationalFunction(num_ * o.num_);
  return make(num_ * o.num_, den_ * o.den_);
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw std::domain_error("symbolic division by zero");
  return make(den_, num_);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const { return *this * o.inverse(); }

RationalFunction RationalFunction::pow(long n) const {
  if (n == 0) return RationalFunction(mpq_class(1));
  if (n < 0) return inverse().pow(-n);
  if (n == 1) return *this;
  RationalFunction r;
  r.num_ = num_.pow(static_cast<unsigned>(n));
  r.den_ = den_.pow(static_cast<unsigned>(n));
  return r;
}

std::set<Kernel> RationalFunction::kernels() const {
  std::set<Kernel> ks = num_.kernels();
  for (Kernel k : den_.kernels()) ks.insert(k);
  return ks;
}

namespace {

RationalFunction derive_poly(const Polynomial& p, const std::map<Kernel, RationalFunction>& dks) {
  RationalFunction acc;
  for (const auto& [k, dk] : dks) {
    if (dk.is_zero() || !p.contains(k)) continue;
    acc = acc + RationalFunction(p.partial(k)) * dk;
  }
  return acc;
}

}  // namespace

RationalFunction derive(const RationalFunction& rf, const std::function<RationalFunction(Kernel)>& dk) {
  std::map<Kernel, RationalFunction> dks;
  for (Kernel k : rf.kernels()) dks.emplace(k, dk(k));
  RationalFunction dn = derive_poly(rf.num(), dks);
  if (rf.is_polynomial()) return dn;
  RationalFunction dd = derive_poly(rf.den(), dks);
  RationalFunction d(rf.den());
  // (N/D)' = N'/D - N D'/D^2
  return dn / d - RationalFunction(rf.num()) * dd / (d * d);
}

RationalFunction partial(const RationalFunction& rf, Kernel k) {
  if (rf.is_polynomial()) return RationalFunction(rf.num().partial(k));
  return derive(rf, [k](Kernel kk) { return kk == k ? RationalFunction(mpq_class(1)) : RationalFunction(); });
}

RationalFunction diff(const RationalFunction& rf, const JetAtom& a) {
  Kernel target = Kernel::of_atom(a);
  std::function<RationalFunction(Kernel)> dk = [&](Kernel k) -> RationalFunction {
    if (k.is_atom()) return k == target ? RationalFunction(mpq_class(1)) : RationalFunction();
    const RationalFunction& arg = k.log_argument().rational();
    RationalFunction darg = derive(arg, dk);
    if (darg.is_zero()) return darg;
    return darg / arg;
  };
  return derive(rf, dk);
}

void collect_jet_atoms(const RationalFunction& rf, std::set<JetAtom>& out) {
  for (Kernel k : rf.kernels()) {
    if (k.is_atom())
      out.insert(k.atom());
    else
      collect_jet_atoms(k.log_argument().rational(), out);
  }
}

std::set<JetAtom> jet_atoms(const RationalFunction& rf) {
  std::set<JetAtom> out;
  collect_jet_atoms(rf, out);
  return out;
}

RationalFunction log_of(const RationalFunction& arg) {
  if (arg.is_zero()) throw std::domain_error("logarithm of zero");
  if (auto c = arg.constant_value(); c && *c == 1) return RationalFunction();
  return RationalFunction::kernel(Kernel::of_log(to_expr(arg)));
}

namespace {

RationalFunction evaluate_poly(const Polynomial& p, const std::map<Kernel, RationalFunction>& values) {
  RationalFunction acc;
  for (const auto& [m, c] : p.terms()) {
    RationalFunction t(c);
    Monomial rest;
    for (const auto& [k, e] : m) {
      auto it = values.find(k);
      if (it == values.end())
        rest.emplace_back(k, e);
      else
        t = t * it->second.pow(e);
    }
    if (!rest.empty()) t = t * RationalFunction(Polynomial::term(rest, 1));
    acc = acc + t;
  }
  return acc;
}

}  // namespace

RationalFunction evaluate(const RationalFunction& rf,
                          const std::function<std::optional<RationalFunction>(const JetAtom&)>& atom_value) {
  std::map<Kernel, RationalFunction> values;
  for (Kernel k : rf.kernels()) {
    if (k.is_atom()) {
      if (auto v = atom_value(k.atom())) values.emplace(k, *v);
    } else {
      const RationalFunction& arg = k.log_argument().rational();
      RationalFunction new_arg = evaluate(arg, atom_value);
      if (!(new_arg == arg)) values.emplace(k, log_of(new_arg));
    }
  }
  if (values.empty()) return rf;
  RationalFunction n = evaluate_poly(rf.num(), values);
  if (rf.is_polynomial()) return n;
  return n / evaluate_poly(rf.den(), values);
}

RationalFunction to_rational_uncached(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return RationalFunction(e.value());
    case Expr::Kind::Atom:
      return RationalFunction::kernel(Kernel::of_atom(e.atom()));
    case Expr::Kind::Sum: {
      // Group polynomial terms first to keep denominators out of the way.
      Polynomial poly;
      RationalFunction rest;
      for (const auto& c : e.children()) {
        const RationalFunction& r = c.rational();
        if (r.is_polynomial())
          poly += r.num();
        else
          rest = rest + r;
      }
      return rest + RationalFunction(poly);
    }
    case Expr::Kind::Product: {
      RationalFunction r(mpq_class(1));
      for (const auto& c : e.children()) r = r * c.rational();
      return r;
    }
    case Expr::Kind::Power:
      return e.children()[0].rational().pow(e.exponent());
    case Expr::Kind::Log:
      return log_of(e.children()[0].rational());
  }
  return RationalFunction();
}

namespace {

Expr kernel_expr(Kernel k) { return k.is_atom() ? Expr(k.atom()) : Expr::log(k.log_argument()); }

Expr term_expr(const Monomial& m, const mpq_class& c) {
  std::vector<Expr> factors;
  factors.reserve(m.size() + 1);
  factors.emplace_back(c);
  for (const auto& [k, e] : m) factors.push_back(Expr::power(kernel_expr(k), e));
  return Expr::product(std::move(factors));
}

Expr poly_expr(const Polynomial& p) {
  std::vector<Expr> terms;
  terms.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) terms.push_back(term_expr(m, c));
  return Expr::sum(std::move(terms));
}

}  // namespace

Expr to_expr_tree(const RationalFunction& rf) {
  Expr n = poly_expr(rf.num());
  if (rf.is_polynomial()) return n;
  Expr inv = Expr::power(poly_expr(rf.den()), -1);
  std::vector<Expr> factors;
  if (n.kind() == Expr::Kind::Product)
    factors = n.children();
  else
    factors.push_back(n);
  factors.push_back(inv);
  return Expr::product(std::move(factors));
}

}  // namespace dba
