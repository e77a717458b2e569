#pragma once

#include <string>

#include <json.hpp>

#include "dba/dirac.hpp"

namespace dba {

// {"kind": "sum", "children": [...]}, {"kind": "constant", "value": "-1/2"},
// {"kind": "atom", "atom": {...}}, {"kind": "power", "exponent": -1, ...}.
nlohmann::json expr_tree(const Expr& e);
Expr expr_from_tree(const nlohmann::json& j);

nlohmann::json report_to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

std::string render_plain(const AnalysisReport& r, bool color);
std::string render_latex(const AnalysisReport& r);

}  // namespace dba
