#include <cmath>

#include "dba/numerics.hpp"

namespace dba {

Evaluator::Evaluator(const Expr& e, const Grid& g) : n_(g.n) {
  std::map<JetAtom, int> index;
  build(e, index);
}

int Evaluator::build(const Expr& e, std::map<JetAtom, int>& index) {
  Node node;
  node.kind = e.kind();
  switch (e.kind()) {
    case Expr::Kind::Constant:
      node.value = e.value().get_d();
      break;
    case Expr::Kind::Atom: {
      const JetAtom& a = e.atom();
      if (a.kind != AtomKind::Field)
        throw NumericError("cannot compile " + to_string(a) + ": only field jets can be evaluated");
      auto [it, fresh] = index.emplace(a, static_cast<int>(atoms_.size()));
      if (fresh) atoms_.push_back(a);
      node.atom = it->second;
      break;
    }
    case Expr::Kind::Power:
      node.exponent = e.exponent();
      [[fallthrough]];
    default:
      for (const auto& c : e.children()) node.children.push_back(build(c, index));
  }
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

Evaluator compile(const Expr& e, const Grid& g) { return Evaluator(e, g); }

namespace {

void multiply_into(Array& acc, const Array& f, const Spectral* dealias) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= f[i];
  if (dealias) dealias->dealias(acc);
}

}  // namespace

Array Evaluator::operator()(const JetTable& jets, const Spectral* dealias) const {
  const auto n = static_cast<std::size_t>(n_);
  std::vector<const Array*> atom_values;
  for (const auto& a : atoms_) {
    auto it = jets.find(a);
    if (it == jets.end()) throw NumericError("no samples for " + to_string(a));
    if (it->second.size() != n) throw NumericError("sample length mismatch for " + to_string(a));
    atom_values.push_back(&it->second);
  }
  std::vector<Array> vals(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& node = nodes_[k];
    Array& out = vals[k];
    switch (node.kind) {
      case Expr::Kind::Constant:
        out.assign(n, node.value);
        break;
      case Expr::Kind::Atom:
        out = *atom_values[static_cast<std::size_t>(node.atom)];
        break;
      case Expr::Kind::Sum:
        out.assign(n, 0.0);
        for (int c : node.children)
          for (std::size_t i = 0; i < n; ++i) out[i] += vals[static_cast<std::size_t>(c)][i];
        break;
      case Expr::Kind::Product: {
        out.assign(n, 1.0);
        double scale = 1.0;
        bool first = true;
        for (int c : node.children) {
          const Node& cn = nodes_[static_cast<std::size_t>(c)];
          if (cn.kind == Expr::Kind::Constant) {
            scale *= cn.value;
            continue;
          }
          if (first) {
            out = vals[static_cast<std::size_t>(c)];
            first = false;
          } else {
            multiply_into(out, vals[static_cast<std::size_t>(c)], dealias);
          }
        }
        for (double& v : out) v *= scale;
        break;
      }
      case Expr::Kind::Power: {
        const Array& b = vals[static_cast<std::size_t>(node.children[0])];
        long p = node.exponent;
        if (p < 0) {
          for (std::size_t i = 0; i < n; ++i)
            if (b[i] == 0.0) throw NumericError("division by zero at index " + std::to_string(i));
        }
        long m = p < 0 ? -p : p;
        out.assign(n, 1.0);
        if (m > 0) {
          out = b;
          for (long r = 1; r < m; ++r) multiply_into(out, b, dealias);
        }
        if (p < 0)
          for (double& v : out) v = 1.0 / v;
        break;
      }
      case Expr::Kind::Log: {
        const Array& b = vals[static_cast<std::size_t>(node.children[0])];
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (!(b[i] > 0.0)) throw NumericError("ln of non-positive sample at index " + std::to_string(i));
          out[i] = std::log(b[i]);
        }
        break;
      }
    }
  }
  return vals.back();
}

Array Evaluator::operator()(const FieldState& s, const Spectral& sp) const {
  return (*this)(spectral_jets(s, atoms_, sp), nullptr);
}

JetTable spectral_jets(const FieldState& s, const std::vector<JetAtom>& atoms, const Spectral& sp, bool dealias) {
  JetTable out;
  for (const auto& a : atoms) {
    if (out.count(a)) continue;
    if (a.kind != AtomKind::Field || a.t_order != 0) throw NumericError("no spatial samples for " + to_string(a));
    auto it = s.fields.find(a.name);
    if (it == s.fields.end()) throw NumericError("state has no field " + a.name);
    out.emplace(a, sp.derivative(it->second, a.x_order, dealias));
  }
  return out;
}

JetTable polar_jets(const Array& amplitude, const Array& phase, const std::string& a_name, const std::string& p_name,
                    int max_order, const Spectral& sp) {
  using C = std::complex<double>;
  const std::size_t n = amplitude.size();
  std::vector<C> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(amplitude[i] > 0.0)) throw NumericError("amplitude vanishes at index " + std::to_string(i));
    u[i] = std::polar(amplitude[i], phase[i]);
  }
  // u^(m) and the derivatives of l = ln u, from u^(m) = sum C(m-1,k) l^(k+1) u^(m-1-k).
  std::vector<std::vector<C>> du{u}, dl{std::vector<C>(n)};
  for (int m = 1; m <= max_order; ++m) du.push_back(sp.derivative(u, m));
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(max_order + 1));
  for (int m = 0; m <= max_order; ++m) {
    binom[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m + 1), 1.0);
    for (int k = 1; k < m; ++k)
      binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] =
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k - 1)] +
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)];
  }
  for (int m = 1; m <= max_order; ++m) {
    std::vector<C> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      C acc = du[static_cast<std::size_t>(m)][i];
      for (int k = 0; k + 1 < m; ++k)
        acc -= binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)] *
               dl[static_cast<std::size_t>(k + 1)][i] * du[static_cast<std::size_t>(m - 1 - k)][i];
      l[i] = acc / u[i];
    }
    dl.push_back(l);
  }
  JetTable out;
  std::vector<Array> da{amplitude};
  out.emplace(JetAtom::field(a_name), amplitude);
  out.emplace(JetAtom::field(p_name), phase);
  for (int m = 1; m <= max_order; ++m) {
    Array p(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = dl[static_cast<std::size_t>(m)][i].imag();
      // a^(m) = sum C(m-1,k) rho^(k+1) a^(m-1-k), rho = Re l
      double acc = 0;
      for (int k = 0; k < m; ++k)
        acc += binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)] *
               dl[static_cast<std::size_t>(k + 1)][i].real() * da[static_cast<std::size_t>(m - 1 - k)][i];
      a[i] = acc;
    }
    da.push_back(a);
    out.emplace(JetAtom::field(a_name, m), a);
    out.emplace(JetAtom::field(p_name, m), p);
  }
  return out;
}

}  // namespace dba
