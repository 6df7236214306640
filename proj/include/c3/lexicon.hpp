#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "c3/category.hpp"

namespace c3 {

// Neighbor condition for a category variant: matches everything, matches only
// an utterance boundary, or matches a set of morpheme classes.
struct ContextCond {
  enum Kind { Any, Boundary, Classes } kind = Any;
  std::set<std::string> classes;

  static ContextCond any() { return {}; }
  static ContextCond boundary() { return {Boundary, {}}; }
  static ContextCond of(std::set<std::string> cs) { return {Classes, std::move(cs)}; }
};

// "BOUNDARY" passed as a neighbor class means the utterance edge.
inline const std::string kBoundary = "BOUNDARY";

bool cond_matches(const ContextCond& cond, const std::string& neighbor_class);

struct Variant {
  ContextCond left;
  ContextCond right;
  CatPtr category;
};

struct MorphemeEntry {
  std::string id;
  std::vector<std::string> surface;  // phoneme symbols
  std::string morph_class;
  std::vector<Variant> variants;  // ordered; first match wins
};

// Which class pairs may be adjacent, and which classes may open/close an
// utterance.
struct ConnectivityMatrix {
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> start_classes;
  std::set<std::string> end_classes;

  bool connectable(const std::string& left, const std::string& right) const {
    return pairs.count({left, right}) > 0;
  }
};

// Deterministic trie over phoneme symbols; accepting nodes carry the entries
// whose surface spells the path.
class PhonemeTrie {
 public:
  struct Node {
    std::map<std::string, int> next;
    std::vector<std::string> entries;  // sorted ids
  };

  PhonemeTrie() : nodes_(1) {}

  void insert(const std::vector<std::string>& surface, const std::string& entry_id);
  // Child index for one symbol step, or -1.
  int step(int node, const std::string& symbol) const;
  const Node& at(int node) const { return nodes_[node]; }
  // Entry ids whose surface equals the sequence exactly.
  std::vector<std::string> lookup(const std::vector<std::string>& seq) const;

 private:
  std::vector<Node> nodes_;
};

struct Lexicon {
  std::set<std::string> phonemes;
  std::set<std::string> classes;
  std::map<std::string, MorphemeEntry> entries;  // by id
  ConnectivityMatrix connectivity;

  const MorphemeEntry& entry(const std::string& id) const;
  const std::string& class_of(const std::string& entry_id) const;
};

// Line formats:
//   phonemes <sym> <sym> ...
//   class <name>
//   connect <leftclass> <rightclass>
//   boundary start <class> ...
//   boundary end <class> ...
//   morpheme <id> <class> /<p>,<p>,.../
//     variant left=<cond> right=<cond> cat=<category>
// where <cond> is ANY, BOUNDARY, or a comma-separated class list. Variant
// lines are indented and attach to the preceding morpheme. '#' starts a
// comment.
Lexicon load_lexicon(std::istream& in, const std::string& source_name = "<lexicon>");
Lexicon load_lexicon_file(const std::string& path);

PhonemeTrie build_trie(const Lexicon& lex);

// Categories for one occurrence of `entry` between the given neighbor classes
// (or kBoundary). The first variant whose conditions match decides; callers
// with several possible neighbors invoke this per pair and union the results.
std::vector<CatPtr> assign_categories(const MorphemeEntry& entry,
                                      const std::string& left_class,
                                      const std::string& right_class);

}  // namespace c3
