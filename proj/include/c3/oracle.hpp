#pragma once

#include "c3/chart.hpp"

namespace c3 {

struct OracleForest {
  std::vector<TreePtr> trees;  // sorted by canonical text, unique
};

// Every binary derivation over the lattice whose root covers the full span
// and unifies with `target` (or any grammar sentence category when null).
// Same lexical candidate assignment and cancellation rules as the chart
// parser, but enumerated exhaustively with no activations. Throws once more
// than `ambiguity_cap` trees materialize, naming the span at fault.
OracleForest exhaustive_parse(const MorphemeLattice& ml, const Lexicon& lex, const Grammar& g,
                              const CatPtr& target = nullptr, size_t ambiguity_cap = 10000);

bool forest_contains(const OracleForest& f, const TreePtr& t);

}  // namespace c3
