#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace c3 {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A category is one of:
//   Basic      - named atom with an optional feature set, e.g. np, s[DEC]
//   Functor    - result category plus an unordered multiset of arguments,
//                consumed to the right ('/') or to the left ('\')
//   Suppressed - an inert category, written with a trailing '|'; it cannot
//                act as a functor and only cancels against a Suppressed slot
//
// Functor arguments may also be a named variable ($X) standing for a whole
// argument multiset; variables are bound during unification and substituted
// away by normalize().
struct Category;
using CatPtr = std::shared_ptr<const Category>;

enum class CatKind { Basic, Functor, Suppressed };
enum class ArgDir { Rightward, Leftward };  // '/' and '\'

struct ArgumentSet {
  std::string var;              // non-empty iff this is a variable
  std::vector<CatPtr> members;  // concrete multiset, kept sorted by rendering

  bool is_variable() const { return !var.empty(); }
};

struct Category {
  CatKind kind;

  // Basic
  std::string name;
  std::vector<std::string> features;  // sorted, unique

  // Functor
  CatPtr result;
  ArgDir dir = ArgDir::Rightward;
  ArgumentSet args;

  // Suppressed
  CatPtr inner;

  static CatPtr basic(std::string name, std::vector<std::string> features = {});
  // Collapses to `result` when given an empty concrete multiset.
  static CatPtr functor(CatPtr result, ArgDir dir, ArgumentSet args);
  static CatPtr functor(CatPtr result, ArgDir dir, std::vector<CatPtr> members);
  static CatPtr variable_functor(CatPtr result, ArgDir dir, std::string var);
  // Throws on double suppression.
  static CatPtr suppressed(CatPtr inner);
};

bool operator==(const Category& a, const Category& b);
inline bool operator!=(const Category& a, const Category& b) { return !(a == b); }
bool equal(const CatPtr& a, const CatPtr& b);

// Deterministic canonical notation; parse(render(c)) == c.
std::string render(const CatPtr& c);
CatPtr parse_category(const std::string& text);

// Variable name -> concrete argument multiset.
using Bindings = std::map<std::string, std::vector<CatPtr>>;

// One-directional structural unification: `pattern` may contain variables,
// `concrete` must not (a variable on the concrete side fails the match).
// Basic categories match on name plus exact feature-set equality.
std::optional<Bindings> unify(const CatPtr& pattern, const CatPtr& concrete);

// Substitutes bound variables and erases functors left with empty argument
// sets. Unbound variables are left in place; see has_variables().
CatPtr normalize(const CatPtr& c, const Bindings& b = {});
bool has_variables(const CatPtr& c);

enum class CancelRule { RightCancel, LeftCancel };

struct CombineResult {
  CatPtr category;
  CancelRule rule;
};

// All single-cancellation results of placing `left` immediately before
// `right`. RightCancel: left is a rightward functor and one of its argument
// slots unifies with right; LeftCancel is the mirror image. A Suppressed
// category never acts as the functor, an ordinary slot never cancels against
// a Suppressed category, and a Suppressed slot cancels only against a
// Suppressed category (all three fall out of structural unification).
// Results are normalized, deduplicated, and ordered by (rule, rendering).
std::vector<CombineResult> combine(const CatPtr& left, const CatPtr& right);

enum class CatClass { Ordinary, SuppressedKind, Activator };

// Activator: a functor with at least one Suppressed argument slot and a
// non-Suppressed result.
CatClass classify(const CatPtr& c);

// Category inventory for one run: the basic-category names in play and the
// categories accepted as complete parses.
struct Grammar {
  std::set<std::string> basic_names;
  std::vector<CatPtr> sentence_categories;
  std::string lexicon_ref;
};

}  // namespace c3
