#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "c3/lexicon.hpp"

namespace c3 {

// DAGs over integer vertices 0..vertex_count-1 in temporal order; every edge
// runs forward and carries a score in (0, 1].
struct PhonemeEdge {
  int from = 0;
  int to = 0;
  std::string symbol;
  double score = 1.0;
};

struct MorphemeEdge {
  int from = 0;
  int to = 0;
  std::string entry_id;
  double score = 1.0;
};

struct PhonemeLattice {
  int vertex_count = 0;
  std::vector<PhonemeEdge> edges;
};

struct MorphemeLattice {
  int vertex_count = 0;
  std::vector<MorphemeEdge> edges;
};

// One morpheme with the vertex span it covers; a full path tiles 0..T.
struct GoldStep {
  std::string entry_id;
  int from = 0;
  int to = 0;
};
using GoldPath = std::vector<GoldStep>;

// Human-readable structural violations; empty means well-formed. Checked:
// edges run forward within range with scores in (0, 1], and every vertex
// used by an edge lies on some 0 -> T path.
std::vector<std::string> validate_lattice(const PhonemeLattice& l);
std::vector<std::string> validate_lattice(const MorphemeLattice& l);

// All morpheme edges (i, j, id, score) such that some phoneme path i -> j
// spells the entry's surface; score is the max product of phoneme scores over
// such paths (optionally the length-normalized geometric mean). Edges that
// end up on no full 0 -> T morpheme path are dropped.
struct DecodeOptions {
  bool length_normalize = false;
};
MorphemeLattice decode_lattice(const PhonemeLattice& pl, const PhonemeTrie& trie,
                               const DecodeOptions& opts = {});

// Greatest sub-lattice in which every edge has a connectable neighbor on each
// non-boundary side and boundary edges belong to legal start/end classes.
// Computed as a pruning fixpoint; equals the set of edges lying on some fully
// connectable, boundary-legal 0 -> T path.
MorphemeLattice filter_lattice(const MorphemeLattice& ml, const ConnectivityMatrix& conn,
                               const Lexicon& lex);

// True iff every (entry, span) step of `gold` is an edge of `ml`.
bool contains_path(const MorphemeLattice& ml, const GoldPath& gold);

// File format:  "lattice <vertex_count> kind=phoneme|morpheme" header, then
// "edge <from> <to> <symbol-or-entry-id> <score>" lines. '#' comments.
struct LatticeFile {
  std::optional<PhonemeLattice> phoneme;
  std::optional<MorphemeLattice> morpheme;
};
LatticeFile load_lattice(std::istream& in, const std::string& source_name = "<lattice>");
LatticeFile load_lattice_file(const std::string& path);
void write_lattice(std::ostream& out, const PhonemeLattice& l);
void write_lattice(std::ostream& out, const MorphemeLattice& l);

// Context-conditioned lexical candidates for every edge: the union of
// assign_categories() results over all neighbor classes present in the
// lattice (boundary at vertices 0 and T). Categories are deduplicated and
// sorted by rendering. Shared by the chart parser and the exhaustive parser
// so both see the same lexical ambiguity.
struct LexicalCandidates {
  // parallel to ml.edges
  std::vector<std::vector<CatPtr>> categories;
};
LexicalCandidates lexical_candidates(const MorphemeLattice& ml, const Lexicon& lex);

}  // namespace c3
