#pragma once

#include "jqml/ast.hpp"
#include "jqml/engine.hpp"

#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace jqml::testing {

struct CorpusQuery {
  std::string name;
  std::string text;
};

inline void PrintTo(const CorpusQuery& query, std::ostream* os) { *os << query.name; }

/// Every *.jq file of the corpus directory, sorted by name.
std::vector<CorpusQuery> load_corpus(const std::string& dir = JQML_CORPUS_DIR);

/// External variables the corpus queries expect.
Bindings corpus_bindings(const std::string& dir = JQML_CORPUS_DIR);

/// Names of the grammar productions used by `module` (node kinds, clause
/// kinds and their variants such as "for-at" or "order-descending").
void collect_productions(const Module& module, std::set<std::string>& out);

/// All productions of the grammar, in the same vocabulary.
const std::set<std::string>& all_productions();

/// Canonical JSON lines of `text` under `policy`, or "error: CODE" on failure.
std::string run_corpus_query(const std::string& text, ModePolicy policy, std::size_t cap = 1'000'000);

}  // namespace jqml::testing
