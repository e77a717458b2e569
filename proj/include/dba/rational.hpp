#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "dba/expr.hpp"

namespace dba {

// Polynomial variable: a jet atom or ln(canonical expression). Kernels are
// interned, so copies are pointer-sized and equality is pointer equality.
class Kernel {
 public:
  static Kernel of_atom(const JetAtom& a);
  static Kernel of_log(const Expr& canonical_arg);

  bool is_atom() const;
  const JetAtom& atom() const;
  const Expr& log_argument() const;

  friend bool operator==(Kernel a, Kernel b) { return a.p_ == b.p_; }
  friend bool operator!=(Kernel a, Kernel b) { return a.p_ != b.p_; }
  // Atoms first (in atom order), then logarithms by argument.
  friend bool operator<(Kernel a, Kernel b);

  struct Data;

 private:
  explicit Kernel(const Data* p) : p_(p) {}
  const Data* p_;
};

// Sorted by kernel, exponents nonzero (negative allowed in numerators).
using Monomial = std::vector<std::pair<Kernel, int>>;

int total_degree(const Monomial& m);
Monomial monomial_mul(const Monomial& a, const Monomial& b);
Monomial monomial_inverse(const Monomial& a);
int exponent_of(const Monomial& m, Kernel k);

// Graded order, ties broken lexicographically with smaller kernels heavier.
// "a before b" means a is the larger term.
struct TermOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, mpq_class, TermOrder>;

  Polynomial() = default;
  Polynomial(const mpq_class& c);
  static Polynomial term(const Monomial& m, const mpq_class& c);
  static Polynomial variable(Kernel k, int e = 1);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<mpq_class> constant_value() const;
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_one() const;

  const Monomial& leading_monomial() const;
  const mpq_class& leading_coefficient() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const mpq_class& c) const;
  Polynomial times(const Monomial& m) const;
  Polynomial pow(unsigned n) const;

  bool operator==(const Polynomial& o) const;

  std::set<Kernel> kernels() const;
  bool contains(Kernel k) const;
  int degree(Kernel k) const;
  int min_degree(Kernel k) const;
  // Coefficients with respect to k, keyed by exponent.
  std::map<int, Polynomial> coefficients(Kernel k) const;
  Polynomial coefficient(Kernel k, int e) const;
  // Per-kernel minimum exponent over all terms (the monomial content).
  Monomial min_monomial() const;
  bool has_negative_exponents() const;

  Polynomial partial(Kernel k) const;

  // Content of the rational coefficients is not removed; this scales so
  // that the leading coefficient is 1.
  Polynomial monic() const;

 private:
  TermMap terms_;
  void add_term(const Monomial& m, const mpq_class& c);
};

// Exact division; throws if b does not divide a.
Polynomial divide_exact(const Polynomial& a, const Polynomial& b);
// Monic gcd of polynomials with nonnegative exponents.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

// N/D with N Laurent, D a monic polynomial without monomial factors,
// gcd(N, D) = 1. D == 1 for polynomial (Laurent) values.
class RationalFunction {
 public:
  RationalFunction() : den_(mpq_class(1)) {}
  RationalFunction(const mpq_class& c) : num_(c), den_(mpq_class(1)) {}
  RationalFunction(const Polynomial& p) : num_(p), den_(mpq_class(1)) {}
  static RationalFunction make(const Polynomial& num, const Polynomial& den);
  static RationalFunction kernel(Kernel k) { return RationalFunction(Polynomial::variable(k)); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_zero() const { return num_.is_zero(); }
  std::optional<mpq_class> constant_value() const;

  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator-() const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction inverse() const;
  RationalFunction pow(long n) const;

  bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }

  std::set<Kernel> kernels() const;

 private:
  Polynomial num_;
  Polynomial den_;
};

// Chain rule: sum over kernels k of (d rf / d k) * dk(k).
RationalFunction derive(const RationalFunction& rf,
                        const std::function<RationalFunction(Kernel)>& dk);
RationalFunction partial(const RationalFunction& rf, Kernel k);
// Derivative with respect to a jet atom, including through logarithms.
RationalFunction diff(const RationalFunction& rf, const JetAtom& a);
// All jet atoms, including those inside logarithm arguments.
std::set<JetAtom> jet_atoms(const RationalFunction& rf);

// Replace kernels by values; logarithm arguments are rewritten recursively.
RationalFunction evaluate(const RationalFunction& rf,
                          const std::function<std::optional<RationalFunction>(const JetAtom&)>& atom_value);

// ln of a rational function as a kernel (argument normalized).
RationalFunction log_of(const RationalFunction& arg);

Expr to_expr(const RationalFunction& rf);

}  // namespace dba
