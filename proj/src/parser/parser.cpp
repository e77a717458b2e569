#include "dba/parser.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "dba/varcalc.hpp"

namespace dba {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Equals, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (c >= 0x80) throw ParseError("non-ASCII character", line, col);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, cc = col;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '=': k = Tok::Equals; break;
      default:
        throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", l, cc);
    }
    out.push_back({k, std::string(1, static_cast<char>(c)), l, cc});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const char* describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::End: return "end of input";
  }
  return "token";
}

bool reserved(const std::string& s) { return s == "Dx" || s == "Dt" || s == "ln" || s == "fields" || s == "L"; }

class Parser {
 public:
  Parser(std::vector<Token> toks, bool phase_atoms) : toks_(std::move(toks)), phase_(phase_atoms) {}

  std::vector<std::string> fields;
  std::vector<SourceSpan> spans;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what + ", found " + found());
    return next();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.column); }

  std::string found() const {
    if (at(Tok::Ident) || at(Tok::Number)) return "'" + peek().text + "'";
    return describe(peek().kind);
  }

  void parse_fields() {
    const Token& kw = expect(Tok::Ident, "'fields'");
    if (kw.text != "fields") fail_at(kw, "expected 'fields', found '" + kw.text + "'");
    do {
      const Token& id = expect(Tok::Ident, "field name");
      if (reserved(id.text)) fail_at(id, "'" + id.text + "' is reserved");
      if (std::find(fields.begin(), fields.end(), id.text) != fields.end())
        fail_at(id, "field '" + id.text + "' declared twice");
      fields.push_back(id.text);
      spans.push_back({id.text, id.line, id.column});
    } while (at(Tok::Comma) && (next(), true));
  }

  bool is_field(const std::string& s) const { return std::find(fields.begin(), fields.end(), s) != fields.end(); }

  // Binding powers: + - 10, * / 20, unary minus 25, ^ 30 (right).
  Expr expression(int min_bp = 0) {
    Expr lhs = prefix();
    for (;;) {
      Tok k = peek().kind;
      int lbp, rbp;
      if (k == Tok::Plus || k == Tok::Minus) {
        lbp = 10;
        rbp = 11;
      } else if (k == Tok::Star || k == Tok::Slash) {
        lbp = 20;
        rbp = 21;
      } else if (k == Tok::Caret) {
        lbp = 30;
        rbp = 30;
      } else {
        break;
      }
      if (lbp < min_bp) break;
      const Token& op = next();
      if (k == Tok::Caret) {
        lhs = Expr::power(lhs, exponent(op, rbp));
        continue;
      }
      Expr rhs = expression(rbp);
      switch (k) {
        case Tok::Plus: lhs = lhs + rhs; break;
        case Tok::Minus: lhs = lhs - rhs; break;
        case Tok::Star: lhs = lhs * rhs; break;
        default:
          if (rhs.is_zero_literal()) fail_at(op, "symbolic division by zero");
          lhs = lhs / rhs;
          break;
      }
    }
    return lhs;
  }

  long exponent(const Token& op, int bp) {
    Expr e = expression(bp);
    if (!e.is_constant() || e.value().get_den() != 1 || !e.value().get_num().fits_slong_p())
      fail_at(op, "exponent must be an integer literal");
    return e.value().get_num().get_si();
  }

  Expr prefix() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Number:
        return Expr(mpq_class(mpz_class(t.text)));
      case Tok::Minus:
        return -expression(25);
      case Tok::LParen: {
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        return identifier(t);
      default:
        fail_at(t, std::string("unexpected ") + (t.kind == Tok::End ? "end of input" : "'" + t.text + "'"));
    }
  }

  Expr identifier(const Token& t) {
    if (t.text == "Dx") return dx(t);
    if (t.text == "Dt") return dt(t);
    if (t.text == "ln") {
      expect(Tok::LParen, "'(' after ln");
      Expr arg = expression();
      expect(Tok::RParen, "')'");
      return ln(arg);
    }
    spans.push_back({t.text, t.line, t.column});
    if (is_field(t.text)) return Expr(JetAtom::field(t.text));
    if (phase_) {
      static const std::regex multiplier(R"((lambda|lambdat|mu|mut)[0-9]+)");
      if (t.text.rfind("pi_", 0) == 0 && is_field(t.text.substr(3))) return Expr(JetAtom::momentum(t.text.substr(3)));
      if (std::regex_match(t.text, multiplier)) return Expr(JetAtom::multiplier(t.text));
    }
    fail_at(t, "undeclared identifier '" + t.text + "'");
  }

  Expr dx(const Token& t) {
    expect(Tok::LParen, "'(' after Dx");
    ++dx_depth_;
    Expr arg = expression();
    --dx_depth_;
    expect(Tok::RParen, "')'");
    if (has_time_jets(arg)) fail_at(t, "Dx applied to a time derivative");
    if (arg.kind() == Expr::Kind::Atom) return Expr(arg.atom().with_x(arg.atom().x_order + 1));
    return total_dx(arg);
  }

  Expr dt(const Token& t) {
    expect(Tok::LParen, "'(' after Dt");
    if (dx_depth_ > 0) fail_at(t, "Dt nested inside Dx");
    const Token& arg = peek();
    if (arg.kind != Tok::Ident || !is_field(arg.text) || toks_[pos_ + 1].kind != Tok::RParen)
      fail_at(arg, "Dt argument must be a declared field");
    next();
    spans.push_back({arg.text, arg.line, arg.column});
    expect(Tok::RParen, "')'");
    return Expr(JetAtom::field(arg.text, 0, 1));
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool phase_;
  int dx_depth_ = 0;
};

}  // namespace

LagrangianSpec parse(std::string_view text) {
  Parser p(lex(text), false);
  p.parse_fields();
  const Token& l = p.expect(Tok::Ident, "'L'");
  if (l.text != "L") p.fail_at(l, "expected 'L', found '" + l.text + "'");
  p.expect(Tok::Equals, "'='");
  Expr density = p.expression();
  if (!p.at(Tok::End)) p.fail("unexpected " + p.found() + " after expression");
  LagrangianSpec spec;
  spec.fields = p.fields;
  try {
    spec.density = normalize(density);
  } catch (const std::domain_error& e) {
    throw ParseError(e.what(), l.line, l.column);
  }
  spec.source_span_map = std::move(p.spans);
  return spec;
}

Expr parse_expression(std::string_view text, const std::vector<std::string>& fields, bool phase_atoms) {
  Parser p(lex(text), phase_atoms);
  p.fields = fields;
  Expr e = p.expression();
  if (!p.at(Tok::End)) p.fail("unexpected " + p.found() + " after expression");
  return e;
}

ReferenceSystem parse_reference(std::string_view text) {
  Parser p(lex(text), true);
  p.parse_fields();
  ReferenceSystem sys;
  sys.fields = p.fields;
  while (!p.at(Tok::End)) {
    const Token& d = p.expect(Tok::Ident, "'Dt'");
    if (d.text != "Dt") p.fail_at(d, "expected 'Dt', found '" + d.text + "'");
    p.expect(Tok::LParen, "'('");
    const Token& f = p.expect(Tok::Ident, "field name");
    if (!p.is_field(f.text)) p.fail_at(f, "Dt argument must be a declared field");
    p.expect(Tok::RParen, "')'");
    p.expect(Tok::Equals, "'='");
    sys.equations.push_back({f.text, normalize(p.expression())});
  }
  return sys;
}

}  // namespace dba
