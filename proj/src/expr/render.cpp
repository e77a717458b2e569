#include <cctype>
#include <functional>
#include <set>
#include <string>

#include "dba/expr.hpp"

namespace dba {

namespace {

std::string jet_suffix(int order, char var) {
  if (order <= 0) return "";
  if (order <= 2) return std::string(static_cast<std::size_t>(order), var);
  return std::to_string(order) + var;
}

std::string jets(const JetAtom& a) { return jet_suffix(a.x_order, 'x') + jet_suffix(a.t_order, 't'); }

const std::set<std::string>& greek() {
  static const std::set<std::string> names = {
      "alpha", "beta",  "gamma",   "delta", "epsilon", "zeta", "eta", "theta",
      "iota",  "kappa", "lambda",  "mu",    "nu",      "xi",   "pi",  "rho",
      "sigma", "tau",   "upsilon", "phi",   "chi",     "psi",  "omega", "Gamma",
      "Delta", "Theta", "Lambda",  "Xi",    "Pi",      "Sigma", "Phi", "Psi", "Omega"};
  return names;
}

std::string latex_symbol(const std::string& name) {
  if (greek().count(name)) return "\\" + name;
  if (name.size() == 1) return name;
  return "\\mathrm{" + name + "}";
}

}  // namespace

// lambda1 -> \lambda_{1}, lambdat1 -> \tilde{\lambda}_{1}, ctt2 -> \tilde{\tilde{c}}_{2}.
std::string latex_label(const std::string& name) {
  std::size_t i = name.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
  std::string stem = name.substr(0, i), index = name.substr(i);
  int tildes = 0;
  if (!greek().count(stem)) {
    std::size_t j = stem.size();
    while (j > 1 && stem[j - 1] == 't') --j;
    std::string base = stem.substr(0, j);
    if (j < stem.size() && (greek().count(base) || base == "c")) {
      tildes = static_cast<int>(stem.size() - j);
      stem = base;
    }
  }
  std::string s = latex_symbol(stem);
  for (int k = 0; k < tildes; ++k) s = "\\tilde{" + s + "}";
  if (!index.empty()) s += "_{" + index + "}";
  return s;
}

namespace {

struct Style {
  std::function<std::string(const JetAtom&)> atom;
  bool latex = false;
  std::string mul = "*";
};

bool negative_term(const Expr& e) {
  if (e.kind() == Expr::Kind::Constant) return e.value() < 0;
  if (e.kind() == Expr::Kind::Product && e.children()[0].kind() == Expr::Kind::Constant)
    return e.children()[0].value() < 0;
  return false;
}

Expr negate_term(const Expr& e) {
  if (e.kind() == Expr::Kind::Constant) return Expr(mpq_class(-e.value()));
  std::vector<Expr> f = e.children();
  f[0] = Expr(mpq_class(-f[0].value()));
  return Expr::product(std::move(f));
}

std::string render(const Expr& e, const Style& s, int context);

// Precedence: 1 sum, 2 product, 3 power, 4 primary.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Sum:
      return 1;
    case Expr::Kind::Product:
      return 2;
    case Expr::Kind::Constant:
      return (e.value() < 0 || e.value().get_den() != 1) ? 2 : 4;
    case Expr::Kind::Power:
      return e.exponent() < 0 ? 2 : 3;
    default:
      return 4;
  }
}

std::string wrap(const std::string& body, bool paren, const Style& s) {
  if (!paren) return body;
  return s.latex ? "\\left(" + body + "\\right)" : "(" + body + ")";
}

std::string render_power_base(const Expr& b, const Style& s) {
  std::string body = render(b, s, 4);
  if (s.latex && b.kind() == Expr::Kind::Atom && body.find('_') != std::string::npos) return "{" + body + "}";
  return body;
}

std::string render_power(const Expr& base, long n, const Style& s) {
  std::string b = render_power_base(base, s);
  if (n == 1) return b;
  if (s.latex) return b + "^{" + std::to_string(n) + "}";
  return b + "^" + std::to_string(n);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string render_product(const std::vector<Expr>& factors, const Style& s) {
  mpq_class c = 1;
  std::vector<std::string> num, den;
  for (const auto& f : factors) {
    if (f.kind() == Expr::Kind::Constant) {
      c *= f.value();
    } else if (f.kind() == Expr::Kind::Power && f.exponent() < 0) {
      den.push_back(render_power(f.children()[0], -f.exponent(), s));
    } else {
      num.push_back(render(f, s, 3));
    }
  }
  std::string sign = c < 0 ? "-" : "";
  mpz_class p = abs(c.get_num());
  mpz_class q = c.get_den();
  if (p != 1 || num.empty()) num.insert(num.begin(), p.get_str());
  if (q != 1) den.insert(den.begin(), q.get_str());
  std::string sep = s.latex ? " " : s.mul;
  if (den.empty()) return sign + join(num, sep);
  if (s.latex) return sign + "\\frac{" + join(num, sep) + "}{" + join(den, sep) + "}";
  std::string d = join(den, sep);
  if (den.size() > 1) d = "(" + d + ")";
  std::string n = join(num, sep);
  return sign + n + "/" + d;
}

std::string render(const Expr& e, const Style& s, int context) {
  std::string body;
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      if (e.value().get_den() == 1) {
        body = e.value().get_str();
      } else {
        body = render_product({e}, s);
      }
      break;
    }
    case Expr::Kind::Atom:
      body = s.atom(e.atom());
      break;
    case Expr::Kind::Sum: {
      const auto& ts = e.children();
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i == 0) {
          body = render(ts[i], s, 1);
        } else if (negative_term(ts[i])) {
          body += " - " + render(negate_term(ts[i]), s, 2);
        } else {
          body += " + " + render(ts[i], s, 2);
        }
      }
      break;
    }
    case Expr::Kind::Product:
      body = render_product(e.children(), s);
      break;
    case Expr::Kind::Power:
      if (e.exponent() < 0)
        body = render_product({e}, s);
      else
        body = render_power(e.children()[0], e.exponent(), s);
      break;
    case Expr::Kind::Log:
      body = (s.latex ? "\\ln\\left(" : "ln(") + render(e.children()[0], s, 0) + (s.latex ? "\\right)" : ")");
      break;
  }
  int p = precedence(e);
  // A leading minus binds like a product.
  if (!body.empty() && body[0] == '-' && p > 2) p = 2;
  return wrap(body, p < context, s);
}

std::string plain_atom(const JetAtom& a) {
  std::string j = jets(a);
  std::string base = a.kind == AtomKind::Momentum ? "pi_" + a.name : a.name;
  return j.empty() ? base : base + "_" + j;
}

std::string source_atom(const JetAtom& a) {
  std::string s = a.kind == AtomKind::Momentum ? "pi_" + a.name : a.name;
  for (int i = 0; i < a.t_order; ++i) s = "Dt(" + s + ")";
  for (int i = 0; i < a.x_order; ++i) s = "Dx(" + s + ")";
  return s;
}

}  // namespace

std::string to_string(const JetAtom& a) { return plain_atom(a); }

std::string to_latex(const JetAtom& a) {
  std::string j = jets(a);
  switch (a.kind) {
    case AtomKind::Field:
      return latex_symbol(a.name) + (j.empty() ? "" : "_{" + j + "}");
    case AtomKind::Momentum:
      return "\\pi_{" + latex_symbol(a.name) + (j.empty() ? "" : "," + j) + "}";
    case AtomKind::Multiplier: {
      std::string m = latex_label(a.name);
      if (j.empty()) return m;
      return "\\left(" + m + "\\right)_{" + j + "}";
    }
  }
  return a.name;
}

std::string to_string(const Expr& e) {
  Style s{plain_atom, false, "*"};
  return render(e, s, 0);
}

std::string to_latex(const Expr& e) {
  Style s{[](const JetAtom& a) { return to_latex(a); }, true, " "};
  return render(e, s, 0);
}

std::string to_source(const Expr& e) {
  Style s{source_atom, false, "*"};
  return render(e, s, 0);
}

}  // namespace dba
