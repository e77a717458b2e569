#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dba/expr.hpp"

namespace dba {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

struct SourceSpan {
  std::string identifier;
  int line = 0;
  int column = 0;
};

struct LagrangianSpec {
  std::vector<std::string> fields;
  Expr density;
  std::vector<SourceSpan> source_span_map;
};

// .lag files:
//   fields phi, theta
//   L = -1/2*Dt(theta)*phi^2 + ...
LagrangianSpec parse(std::string_view text);

// A single expression over declared fields. With phase_atoms, momenta
// (pi_<field>) and multipliers (lambda<k>, lambdat<k>, mu<k>, ...) are
// accepted too.
Expr parse_expression(std::string_view text, const std::vector<std::string>& fields, bool phase_atoms = true);

// Reference equations of motion (.eom files):
//   fields phi, theta
//   Dt(phi) = ...
//   Dt(theta) = ...
struct ReferenceEquation {
  std::string field;
  Expr rhs;
};

struct ReferenceSystem {
  std::vector<std::string> fields;
  std::vector<ReferenceEquation> equations;
};

ReferenceSystem parse_reference(std::string_view text);

}  // namespace dba
