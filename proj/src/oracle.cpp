#include "c3/oracle.hpp"

#include <algorithm>
#include <map>

namespace c3 {

OracleForest exhaustive_parse(const MorphemeLattice& ml, const Lexicon& lex, const Grammar& g,
                              const CatPtr& target, size_t ambiguity_cap) {
  if (ml.edges.empty()) return {};
  auto violations = validate_lattice(ml);
  if (!violations.empty()) throw Error("oracle input: " + violations.front());

  LexicalCandidates cands = lexical_candidates(ml, lex);

  std::map<Span, std::vector<TreePtr>> cells;
  size_t total = 0;
  auto account = [&](Span at) {
    if (++total > ambiguity_cap)
      throw Error("ambiguity cap exceeded at span [" + std::to_string(at.from) + "," +
                  std::to_string(at.to) + "]");
  };

  for (size_t i = 0; i < ml.edges.size(); ++i) {
    const auto& e = ml.edges[i];
    for (const auto& cat : cands.categories[i]) {
      auto leaf = std::make_shared<ParseTree>();
      leaf->category = cat;
      leaf->span = {e.from, e.to};
      leaf->entry_id = e.entry_id;
      account(leaf->span);
      cells[leaf->span].push_back(leaf);
    }
  }

  const int t = ml.vertex_count - 1;
  for (int len = 2; len <= t; ++len) {
    for (int from = 0; from + len <= t; ++from) {
      Span span{from, from + len};
      for (int mid = from + 1; mid < from + len; ++mid) {
        auto lit = cells.find({from, mid});
        auto rit = cells.find({mid, from + len});
        if (lit == cells.end() || rit == cells.end()) continue;
        for (const auto& l : lit->second) {
          for (const auto& r : rit->second) {
            for (const auto& res : combine(l->category, r->category)) {
              if (has_variables(res.category)) continue;
              auto node = std::make_shared<ParseTree>();
              node->category = res.category;
              node->span = span;
              node->left = l;
              node->right = r;
              account(span);
              cells[span].push_back(node);
            }
          }
        }
      }
    }
  }

  OracleForest forest;
  auto full = cells.find({0, t});
  if (full != cells.end()) {
    for (const auto& tree : full->second) {
      bool ok = target ? unify(target, tree->category).has_value() : false;
      if (!target)
        for (const auto& s : g.sentence_categories)
          if (unify(s, tree->category)) {
            ok = true;
            break;
          }
      if (ok) forest.trees.push_back(tree);
    }
  }
  std::sort(forest.trees.begin(), forest.trees.end(),
            [](const TreePtr& a, const TreePtr& b) { return tree_text(a) < tree_text(b); });
  forest.trees.erase(std::unique(forest.trees.begin(), forest.trees.end(),
                                 [](const TreePtr& a, const TreePtr& b) {
                                   return tree_text(a) == tree_text(b);
                                 }),
                     forest.trees.end());
  return forest;
}

bool forest_contains(const OracleForest& f, const TreePtr& t) {
  const std::string text = tree_text(t);
  return std::any_of(f.trees.begin(), f.trees.end(),
                     [&](const TreePtr& x) { return tree_text(x) == text; });
}

}  // namespace c3
