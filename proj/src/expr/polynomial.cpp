#include <algorithm>
#include <deque>
#include <mutex>
#include <stdexcept>

#include "dba/rational.hpp"

namespace dba {

struct Kernel::Data {
  bool is_atom = true;
  JetAtom atom;
  Expr arg;
};

namespace {

struct AtomKey {
  bool operator()(const JetAtom& a, const JetAtom& b) const { return a < b; }
};

struct ArgKey {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Kernels live for the whole process; the deque keeps addresses stable.
struct KernelTable {
  std::mutex mu;
  std::deque<Kernel::Data> storage;
  std::map<JetAtom, const Kernel::Data*, AtomKey> atoms;
  std::map<Expr, const Kernel::Data*, ArgKey> logs;
};

KernelTable& table() {
  static KernelTable t;
  return t;
}

}  // namespace

Kernel Kernel::of_atom(const JetAtom& a) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.atoms.find(a);
  if (it != t.atoms.end()) return Kernel(it->second);
  t.storage.push_back(Data{true, a, Expr()});
  const Data* p = &t.storage.back();
  t.atoms.emplace(a, p);
  return Kernel(p);
}

Kernel Kernel::of_log(const Expr& canonical_arg) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.logs.find(canonical_arg);
  if (it != t.logs.end()) return Kernel(it->second);
  t.storage.push_back(Data{false, JetAtom{}, canonical_arg});
  const Data* p = &t.storage.back();
  t.logs.emplace(canonical_arg, p);
  return Kernel(p);
}

bool Kernel::is_atom() const { return p_->is_atom; }
const JetAtom& Kernel::atom() const { return p_->atom; }
const Expr& Kernel::log_argument() const { return p_->arg; }

bool operator<(Kernel a, Kernel b) {
  if (a.p_ == b.p_) return false;
  if (a.p_->is_atom != b.p_->is_atom) return a.p_->is_atom;
  if (a.p_->is_atom) return a.p_->atom < b.p_->atom;
  return compare(a.p_->arg, b.p_->arg) < 0;
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [k, e] : m) d += e;
  return d;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      int e = a[i].second + b[j].second;
      if (e != 0) r.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial monomial_inverse(const Monomial& a) {
  Monomial r = a;
  for (auto& p : r) p.second = -p.second;
  return r;
}

int exponent_of(const Monomial& m, Kernel k) {
  for (const auto& [kk, e] : m)
    if (kk == k) return e;
  return 0;
}

bool TermOrder::operator()(const Monomial& a, const Monomial& b) const {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  std::size_t i = 0;
  for (; i < a.size() && i < b.size(); ++i) {
    if (a[i].first != b[i].first)
      return a[i].first < b[i].first ? a[i].second > 0 : b[i].second < 0;
    if (a[i].second != b[i].second) return a[i].second > b[i].second;
  }
  // The longer monomial has an extra kernel with nonzero exponent.
  if (i < a.size()) return a[i].second > 0;
  if (i < b.size()) return b[i].second < 0;
  return false;
}

Polynomial::Polynomial(const mpq_class& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Polynomial Polynomial::term(const Monomial& m, const mpq_class& c) {
  Polynomial p;
  if (c != 0) p.terms_.emplace(m, c);
  return p;
}

Polynomial Polynomial::variable(Kernel k, int e) {
  if (e == 0) return Polynomial(mpq_class(1));
  return term(Monomial{{k, e}}, 1);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::optional<mpq_class> Polynomial::constant_value() const {
  if (terms_.empty()) return mpq_class(0);
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

bool Polynomial::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1;
}

const Monomial& Polynomial::leading_monomial() const { return terms_.begin()->first; }
const mpq_class& Polynomial::leading_coefficient() const { return terms_.begin()->second; }

void Polynomial::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  if (is_zero() || o.is_zero()) return r;
  if (auto c = o.constant_value()) return *this * *c;
  if (auto c = constant_value()) return o * *c;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(monomial_mul(ma, mb), ca * cb);
  return r;
}

Polynomial Polynomial::operator*(const mpq_class& c) const {
  if (c == 0) return Polynomial();
  Polynomial r = *this;
  if (c != 1)
    for (auto& [m, v] : r.terms_) v *= c;
  return r;
}

Polynomial Polynomial::times(const Monomial& m) const {
  if (m.empty()) return *this;
  Polynomial r;
  for (const auto& [mm, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), monomial_mul(mm, m), c);
  return r;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result(mpq_class(1));
  Polynomial base = *this;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  for (; a != terms_.end(); ++a, ++b) {
    if (a->second != b->second) return false;
    if (a->first.size() != b->first.size()) return false;
    for (std::size_t i = 0; i < a->first.size(); ++i)
      if (a->first[i] != b->first[i]) return false;
  }
  return true;
}

std::set<Kernel> Polynomial::kernels() const {
  std::set<Kernel> ks;
  for (const auto& [m, c] : terms_)
    for (const auto& [k, e] : m) ks.insert(k);
  return ks;
}

bool Polynomial::contains(Kernel k) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [kk, e] : m)
      if (kk == k) return true;
  return false;
}

int Polynomial::degree(Kernel k) const {
  int d = 0;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    int e = exponent_of(m, k);
    if (first || e > d) d = e;
    first = false;
  }
  return d;
}

int Polynomial::min_degree(Kernel k) const {
  int d = 0;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    int e = exponent_of(m, k);
    if (first || e < d) d = e;
    first = false;
  }
  return d;
}

std::map<int, Polynomial> Polynomial::coefficients(Kernel k) const {
  std::map<int, Polynomial> out;
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    int e = 0;
    for (const auto& p : m) {
      if (p.first == k)
        e = p.second;
      else
        rest.push_back(p);
    }
    out[e].add_term(rest, c);
  }
  return out;
}

Polynomial Polynomial::coefficient(Kernel k, int e) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    if (exponent_of(m, k) != e) continue;
    Monomial rest;
    for (const auto& p : m)
      if (p.first != k) rest.push_back(p);
    r.add_term(rest, c);
  }
  return r;
}

Monomial Polynomial::min_monomial() const {
  if (terms_.empty()) return {};
  std::map<Kernel, int> mins;
  std::set<Kernel> ks = kernels();
  for (Kernel k : ks) mins[k] = min_degree(k);
  Monomial r;
  for (Kernel k : ks)
    if (mins[k] != 0) r.emplace_back(k, mins[k]);
  return r;
}

bool Polynomial::has_negative_exponents() const {
  for (const auto& [m, c] : terms_)
    for (const auto& [k, e] : m)
      if (e < 0) return true;
  return false;
}

Polynomial Polynomial::partial(Kernel k) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    int e = exponent_of(m, k);
    if (e == 0) continue;
    Monomial mm;
    for (const auto& p : m) {
      if (p.first != k)
        mm.push_back(p);
      else if (p.second != 1)
        mm.emplace_back(k, p.second - 1);
    }
    r.add_term(mm, c * e);
  }
  return r;
}

Polynomial Polynomial::monic() const {
  if (terms_.empty()) return *this;
  mpq_class lc = leading_coefficient();
  if (lc == 1) return *this;
  return *this * mpq_class(1 / lc);
}

Polynomial divide_exact(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("symbolic division by zero");
  if (auto c = b.constant_value()) return a * mpq_class(1 / *c);
  Polynomial q;
  Polynomial r = a;
  const Monomial& mb = b.leading_monomial();
  const mpq_class& cb = b.leading_coefficient();
  Monomial mb_inv = monomial_inverse(mb);
  while (!r.is_zero()) {
    Monomial m = monomial_mul(r.leading_monomial(), mb_inv);
    for (const auto& [k, e] : m)
      if (e < 0) throw std::logic_error("divide_exact: not divisible");
    Polynomial t = Polynomial::term(m, r.leading_coefficient() / cb);
    q += t;
    r -= t * b;
  }
  return q;
}

namespace {

Polynomial gcd_no_monomial(const Polynomial& a, const Polynomial& b);

// Pseudo-remainder of a by b with respect to v.
Polynomial prem(const Polynomial& a, const Polynomial& b, Kernel v) {
  int db = b.degree(v);
  Polynomial lcb = b.coefficient(v, db);
  Polynomial r = a;
  while (!r.is_zero()) {
    int dr = r.degree(v);
    if (dr < db) break;
    Polynomial lcr = r.coefficient(v, dr);
    r = lcb * r - (lcr * b).times(dr > db ? Monomial{{v, dr - db}} : Monomial{});
  }
  return r;
}

Polynomial content_in(const Polynomial& p, Kernel v) {
  Polynomial g;
  for (const auto& [e, c] : p.coefficients(v)) {
    g = g.is_zero() ? c.monic() : gcd(g, c);
    if (g.is_constant()) return Polynomial(mpq_class(1));
  }
  return g;
}

// p scaled to integer coefficients with gcd 1, which keeps the
// pseudo-remainder sequence from swelling.
Polynomial integer_primitive(const Polynomial& p) {
  mpz_class den = 1, num = 0;
  for (const auto& [m, c] : p.terms()) {
    den = lcm(den, c.get_den());
    num = gcd(num, c.get_num());
  }
  if (num == 0) return p;
  mpq_class scale(den, num);
  scale.canonicalize();
  return p * scale;
}

Polynomial primitive_in(const Polynomial& p, Kernel v) {
  Polynomial c = content_in(p, v);
  if (c.is_constant()) return integer_primitive(p);
  return integer_primitive(divide_exact(p, c));
}

// Coefficients of p with respect to the kernels outside `inside`.
std::vector<Polynomial> split_outside(const Polynomial& p, const std::set<Kernel>& inside) {
  std::map<Monomial, Polynomial> groups;
  for (const auto& [m, c] : p.terms()) {
    Monomial out, in;
    for (const auto& ke : m) (inside.count(ke.first) ? in : out).push_back(ke);
    groups[out] += Polynomial::term(in, c);
  }
  std::vector<Polynomial> r;
  for (auto& [m, c] : groups) r.push_back(std::move(c));
  return r;
}

Polynomial gcd_no_monomial(const Polynomial& a, const Polynomial& b) {
  if (a.is_constant() || b.is_constant()) return Polynomial(mpq_class(1));
  if (a.monic() == b.monic()) return a.monic();

  // Pick a main variable present in both; if none, the gcd lies in the
  // contents with respect to a variable of a.
  std::set<Kernel> ka = a.kernels();
  std::set<Kernel> kb = b.kernels();
  std::optional<Kernel> v;
  for (Kernel k : ka)
    if (kb.count(k)) {
      v = k;
      break;
    }
  if (!v) return Polynomial(mpq_class(1));

  // The gcd only involves shared kernels, so it divides every coefficient
  // with respect to the others; those coefficients have fewer variables.
  std::set<Kernel> shared;
  for (Kernel k : ka)
    if (kb.count(k)) shared.insert(k);
  if (shared.size() < ka.size() || shared.size() < kb.size()) {
    std::vector<Polynomial> parts = split_outside(a, shared);
    std::vector<Polynomial> pb = split_outside(b, shared);
    parts.insert(parts.end(), pb.begin(), pb.end());
    std::sort(parts.begin(), parts.end(),
              [](const Polynomial& x, const Polynomial& y) { return x.terms().size() < y.terms().size(); });
    Polynomial g = parts.front().monic();
    for (std::size_t i = 1; i < parts.size() && !g.is_constant(); ++i) g = gcd(g, parts[i]);
    return g.is_constant() ? Polynomial(mpq_class(1)) : g.monic();
  }

  Polynomial ca = content_in(a, *v);
  Polynomial cb = content_in(b, *v);
  Polynomial c = gcd(ca, cb);
  Polynomial pa = integer_primitive(ca.is_constant() ? a : divide_exact(a, ca));
  Polynomial pb = integer_primitive(cb.is_constant() ? b : divide_exact(b, cb));
  if (pa.degree(*v) < pb.degree(*v)) std::swap(pa, pb);

  while (!pb.is_zero()) {
    Polynomial r = prem(pa, pb, *v);
    pa = pb;
    if (r.is_zero()) {
      pb = Polynomial();
      break;
    }
    if (r.degree(*v) == 0) {
      pa = Polynomial(mpq_class(1));
      break;
    }
    pb = primitive_in(r, *v);
  }
  Polynomial g = pa.is_constant() ? Polynomial(mpq_class(1)) : primitive_in(pa, *v);
  return (c * g).monic();
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(mpq_class(1));
  Monomial ma = a.min_monomial();
  Monomial mb = b.min_monomial();
  // Common monomial factor: per-kernel minimum of the two contents.
  Monomial common;
  for (const auto& [k, e] : ma) {
    int f = std::min(e, exponent_of(mb, k));
    if (f > 0) common.emplace_back(k, f);
  }
  Polynomial ra = a.times(monomial_inverse(ma));
  Polynomial rb = b.times(monomial_inverse(mb));
  Polynomial g;
  if (ra.is_monomial() || rb.is_monomial())
    g = Polynomial(mpq_class(1));
  else
    g = gcd_no_monomial(ra, rb);
  return g.times(common).monic();
}

}  // namespace dba
