#include <doctest.h>

#include "support/testing.hpp"

using namespace dba;
using namespace dba::testing;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  return ParseError("", 0, 0);
}

// Independent construction of the cubic NLS density from atoms.
Expr cubic_density() {
  Expr phi = F("phi"), phi_x = F("phi", 1), th_x = F("theta", 1), th_t = F("theta", 0, 1);
  Expr half(mpq_class(1, 2));
  return -half * th_t * pow(phi, 2) + half * pow(phi, 4) - half * pow(phi_x, 2) - half * pow(th_x, 2) * pow(phi, 2);
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("cubic NLS file") {
    LagrangianSpec s =
        parse("fields phi, theta\nL = -1/2*Dt(theta)*phi^2 + 1/2*phi^4 - 1/2*Dx(phi)^2 - 1/2*Dx(theta)^2*phi^2\n");
    CHECK(s.fields == std::vector<std::string>{"phi", "theta"});
    CHECK(s.density == normalize(cubic_density()));
  }

  TEST_CASE("KdV file") {
    LagrangianSpec s = parse("fields phi, psi\nL = 1/2*Dt(phi)*Dx(phi) + Dx(phi)^3 + Dx(phi)*Dx(psi) + 1/2*psi^2\n");
    Expr phi_x = F("phi", 1), psi = F("psi"), psi_x = F("psi", 1), phi_t = F("phi", 0, 1);
    Expr half(mpq_class(1, 2));
    CHECK(s.density == normalize(half * phi_t * phi_x + pow(phi_x, 3) + phi_x * psi_x + half * pow(psi, 2)));
  }

  TEST_CASE("Dt of a derivative is rejected") {
    ParseError e = parse_error("fields phi\nL = Dt(Dx(phi))\n");
    CHECK(e.message() == "Dt argument must be a declared field");
    CHECK(e.line() == 2);
    CHECK(e.column() == 8);
  }

  TEST_CASE("error positions") {
    ParseError u = parse_error("fields phi\nL = phi + chi\n");
    CHECK(u.message() == "undeclared identifier 'chi'");
    CHECK(u.line() == 2);
    CHECK(u.column() == 11);

    ParseError s = parse_error("fields phi\nL = phi * )\n");
    CHECK(s.message() == "unexpected ')'");
    CHECK(s.line() == 2);
    CHECK(s.column() == 11);

    ParseError n = parse_error("fields phi\nL = Dx(Dt(phi))\n");
    CHECK(n.message() == "Dt nested inside Dx");

    ParseError c = parse_error("fields phi\n\n  L = phi $ 2\n");
    CHECK(c.line() == 3);
    CHECK(c.column() == 11);

    ParseError x = parse_error("fields phi\nL = phi^(1/2)\n");
    CHECK(x.message() == "exponent must be an integer literal");

    ParseError nd = parse_error("fields phi, phi\nL = phi\n");
    CHECK(nd.message() == "field 'phi' declared twice");

    CHECK_THROWS_AS(parse("fields \xcf\x86\nL = 1\n"), ParseError);
  }

  TEST_CASE("comments and whitespace") {
    LagrangianSpec a = parse("# header\nfields   phi ,theta # two\n  L=phi*Dx( theta )  # end\n");
    LagrangianSpec b = parse("fields phi, theta\nL = phi*Dx(theta)\n");
    CHECK(a.density == b.density);
  }

  TEST_CASE("precedence") {
    std::vector<std::string> f{"phi", "theta"};
    CHECK(normalize(parse_expression("-1/2*Dx(theta)^2*phi^2", f, false)) ==
          normalize(parse_expression("((-1)/2)*((Dx(theta))^2)*(phi^2)", f, false)));
    // Power binds tighter than unary minus and is right-associative.
    Expr phi = F("phi");
    CHECK(parse_expression("-phi^2", f, false) == normalize(-pow(phi, 2)));
    CHECK(parse_expression("2^3^2", f, false) == Expr(512));
    CHECK(parse_expression("1 - 2 - 3", f, false) == Expr(-4));
    CHECK(parse_expression("12/4/3", f, false) == Expr(1));
  }

  TEST_CASE("Dx expands compound arguments") {
    std::vector<std::string> f{"phi"};
    CHECK(parse_expression("Dx(phi^2/2)", f, false) == normalize(F("phi") * F("phi", 1)));
    CHECK(parse_expression("Dx(Dx(Dx(phi)))", f, false) == Expr(F("phi", 3)));
    CHECK(parse_expression("Dx(ln(phi))", f, false) == normalize(Expr(F("phi", 1)) / F("phi")));
  }

  TEST_CASE("render then reparse is structurally identical") {
    for (const auto& entry : builtin_corpus()) {
      LagrangianSpec s = parse(entry.lagrangian);
      std::string fields = "fields ";
      for (std::size_t i = 0; i < s.fields.size(); ++i) fields += (i ? ", " : "") + s.fields[i];
      LagrangianSpec r = parse(fields + "\nL = " + to_source(s.density) + "\n");
      CAPTURE(entry.name);
      CHECK(r.density == s.density);
    }
  }

  TEST_CASE("density atoms are declared field jets only") {
    for (const auto& entry : builtin_corpus()) {
      LagrangianSpec s = parse(entry.lagrangian);
      for (const auto& a : atoms(s.density)) {
        CHECK(a.kind == AtomKind::Field);
        CHECK(std::find(s.fields.begin(), s.fields.end(), a.name) != s.fields.end());
        if (a.t_order == 1) CHECK(a.x_order == 0);
      }
    }
  }

  TEST_CASE("reference equations") {
    ReferenceSystem r = parse_reference("fields phi, theta\nDt(phi) = -Dx(Dx(theta))*phi\nDt(theta) = 1/phi\n");
    REQUIRE(r.equations.size() == 2);
    CHECK(r.equations[0].field == "phi");
    CHECK(r.equations[1].rhs == normalize(1 / Expr(F("phi"))));
  }
}
