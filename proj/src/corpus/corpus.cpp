#include "dba/corpus.hpp"

#include <map>

namespace dba {

namespace {

struct Raw {
  const char* name;
  const char* lagrangian;
  const char* eom;  // empty when absent
};

#include "corpus_data.inc"

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d{
      {"cubic-nls", "cubic NLS in amplitude/phase variables"},
      {"log-nls", "logarithmic NLS in amplitude/phase variables"},
      {"kdv", "KdV with potential phi (u = phi_x) and auxiliary psi = phi_xx"},
      {"fourth-order-nls", "fourth-order NLS with auxiliary fields xi = phi_x, gamma = theta_xx"},
      {"fourth-order-nls-direct", "fourth-order NLS, higher-derivative Lagrangian in phi, theta only"},
  };
  return d;
}

}  // namespace

const std::vector<CorpusEntry>& builtin_corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    for (const Raw& r : kCorpus) {
      CorpusEntry e{r.name, "", r.lagrangian, std::nullopt};
      auto it = descriptions().find(e.name);
      if (it != descriptions().end()) e.description = it->second;
      if (*r.eom) e.eom = r.eom;
      out.push_back(e);
    }
    return out;
  }();
  return entries;
}

const CorpusEntry* find_builtin(std::string_view name) {
  for (const auto& e : builtin_corpus())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace dba
