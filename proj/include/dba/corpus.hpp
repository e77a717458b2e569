#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dba {

// Built-in systems, embedded from corpus/ at configure time.
struct CorpusEntry {
  std::string name;
  std::string description;
  std::string lagrangian;          // .lag text
  std::optional<std::string> eom;  // .eom reference equations, when shipped
};

const std::vector<CorpusEntry>& builtin_corpus();
const CorpusEntry* find_builtin(std::string_view name);

}  // namespace dba
