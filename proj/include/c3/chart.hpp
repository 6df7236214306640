#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "c3/lattice.hpp"

namespace c3 {

enum class DecayMode { Retention, Literal };

struct RelaxationParams {
  double rho = 0.05;        // bottom-up spread rate
  double rho_prime = 0.03;  // top-down spread rate
  double d = 0.87;          // decay constant
  double theta = 0.51;      // generation threshold
  double phi = 0.066;       // removal floor
  double init_gamma = 1.0;  // birth activation = init_gamma * mean(constituents)
  double epsilon = 1e-4;    // convergence tolerance
  int max_cycles = 200;
  DecayMode decay_mode = DecayMode::Retention;
};

// Override file: "key value" lines (rho, rho_prime, d, theta, phi,
// init_gamma, epsilon, max_cycles, decay_mode=retention|literal).
RelaxationParams load_params(std::istream& in, RelaxationParams base = {},
                             const std::string& source_name = "<params>");
RelaxationParams load_params_file(const std::string& path, RelaxationParams base = {});

struct Span {
  int from = 0;
  int to = 0;
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

using NodeId = int;

// A constituent support record. Complete derivations carry both roles;
// expectation support carries the functor only. A role whose node has been
// removed is cleared; a pair with no live role is dropped.
struct SupportPair {
  std::optional<NodeId> functor;
  std::optional<NodeId> argument;
  bool full() const { return functor && argument; }
  friend bool operator==(const SupportPair&, const SupportPair&) = default;
};

struct ChartNode {
  enum class Kind { Lexical, Phrasal };

  NodeId id = -1;
  CatPtr category;
  std::string category_text;  // cached canonical rendering
  Span span;
  Kind kind = Kind::Phrasal;
  // Phrasal: which side supplied the functor (RightCancel = left side).
  CancelRule orientation = CancelRule::RightCancel;
  // Lexical
  std::string entry_id;
  double source_score = 0.0;
  double init_activation = 0.0;

  double activation = 0.0;
  std::vector<SupportPair> support;  // phrasal only

  int cr() const { return kind == Kind::Lexical ? 0 : 2; }
  int ca() const;  // 2 with a full live pair, 1 with only half pairs
};

// Triangular chart over lattice vertices. Node identity is
// (category, span, kind/orientation[, entry]); re-derivations merge into the
// existing node's support. Iteration is deterministic: cells by span, nodes
// within a cell by (category text, kind, orientation, entry).
class Chart {
 public:
  int vertex_count = 0;
  std::vector<std::string> diagnostics;  // skipped edges etc.

  ChartNode& node(NodeId id) { return nodes_[id]; }
  const ChartNode& node(NodeId id) const { return nodes_[id]; }
  bool alive(NodeId id) const { return alive_[id]; }

  // Alive node ids in canonical order.
  std::vector<NodeId> all_nodes() const;
  std::vector<NodeId> cell(Span s) const;
  bool cell_occupied(Span s) const;

  NodeId add_lexical(CatPtr category, Span span, const std::string& entry_id,
                     double source_score, double activation);
  // Create-or-merge; returns the node and whether a new node or new support
  // pair appeared.
  std::pair<NodeId, bool> add_phrasal(CatPtr category, Span span, CancelRule orientation,
                                      const SupportPair& pair, double birth_activation);
  void remove(NodeId id);

  // Distinct live constituents of a node / live parents of a node.
  std::vector<NodeId> constituents(NodeId id) const;
  std::map<NodeId, std::vector<NodeId>> parent_map() const;

 private:
  struct Key {
    Span span;
    std::string text;
    int kind;
    int orientation;
    std::string entry;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.span, a.text, a.kind, a.orientation, a.entry) <
             std::tie(b.span, b.text, b.kind, b.orientation, b.entry);
    }
  };
  static Key key_of(const ChartNode& n);

  std::vector<ChartNode> nodes_;
  std::vector<bool> alive_;
  std::map<Key, NodeId> index_;
  std::map<Span, std::vector<NodeId>> cells_;
};

// One lexical node per (edge, assigned category); activations are edge scores
// normalized so the chart maximum is 1.0. Throws if the lattice is empty;
// edges with no applicable variant are reported in diagnostics and skipped.
Chart init_chart(const MorphemeLattice& ml, const Lexicon& lex, const Grammar& g);

// Parent-span options for a node spanning [i, j]: ([k, j], partner [k, i])
// for every k < i with a non-empty cell [k, i], then ([i, k], partner [j, k])
// for every k > j with a non-empty cell [j, k].
struct ParentOption {
  Span parent;
  Span partner;
};
std::vector<ParentOption> allowed_parent_spans(const Chart& chart, NodeId n);

// One generation sweep over the start-of-step snapshot: nodes above theta
// combine with partner-cell nodes (full support) and functors project
// expectation nodes (functor-only support). Returns how many nodes were
// created or gained a support pair.
int add_nodes_step(Chart& chart, const RelaxationParams& p);

// Simultaneous activation exchange from a snapshot: each node with n live
// parents sends parent i the amount n*rho*a*(a_i^2 / sum_j a_j^2) (equal
// split when all parent activations are zero); each node with m live
// constituents sends each rho'*a/m. Results clamp to [0, 1]; lexical nodes
// reset to their initialization value.
void spread_step(Chart& chart, const RelaxationParams& p);

// Multiplies each phrasal activation by d * Ca/Cr (Retention) or
// (1-d) * Ca/Cr (Literal), then removes phrasal nodes below phi, cascading
// support cleanup within the step. Returns the number removed.
int decay_step(Chart& chart, const RelaxationParams& p);

// Formula helpers (also used by the numeric unit checks).
std::vector<double> bottom_up_shares(double rho, double child_activation,
                                     const std::vector<double>& parent_activations);
double top_down_share(double rho_prime, double activation, int constituent_count);
double decayed_activation(DecayMode mode, double d, double activation, int ca, int cr);

struct ParseForest {
  std::vector<NodeId> roots;  // canonical order
};

// Cycles add -> spread -> decay until activations are epsilon-quiet with no
// structural change for 3 consecutive cycles, or max_cycles. Returns the
// full-span nodes with a complete derivation whose category unifies with
// `target` (or any grammar sentence category when target is null). A trace
// stream gets one line per cycle (adds, removals, max activation change).
ParseForest run_relaxation(Chart& chart, const Grammar& g, const RelaxationParams& p,
                           const CatPtr& target = nullptr, std::ostream* trace = nullptr);

struct ParseTree {
  CatPtr category;
  Span span;
  std::string entry_id;  // leaves only
  std::shared_ptr<const ParseTree> left, right;

  bool leaf() const { return !left; }
};
using TreePtr = std::shared_ptr<const ParseTree>;

// Canonical text: leaves "(CAT[from,to] entry)", internal nodes
// "(CAT[from,to] left right)".
std::string tree_text(const TreePtr& t);
std::vector<std::string> tree_leaves(const TreePtr& t);
int tree_size(const TreePtr& t);

// Best derivation under a root: at each node the full support pair with the
// highest summed activation wins (ties: lexicographically smaller rendered
// child categories, then smaller left-child span).
TreePtr extract_tree(const Chart& chart, NodeId root);

// Root with the highest activation (ties: fewer tree nodes, then
// lexicographically smaller tree text); nullopt on an empty forest.
std::optional<TreePtr> best_parse(const Chart& chart, const ParseForest& forest);

}  // namespace c3
