#include "c3/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace c3 {

namespace {

template <typename Edge>
std::vector<std::string> validate_edges(int vertex_count, const std::vector<Edge>& edges,
                                        const std::string& label) {
  std::vector<std::string> out;
  if (vertex_count < 2) out.push_back("lattice needs at least 2 vertices");
  for (size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.from < 0 || e.to >= vertex_count)
      out.push_back(label + " edge " + std::to_string(i) + " out of range");
    if (e.from >= e.to)
      out.push_back(label + " edge " + std::to_string(i) + " not forward: " +
                    std::to_string(e.from) + "->" + std::to_string(e.to));
    if (!(e.score > 0.0) || e.score > 1.0)
      out.push_back(label + " edge " + std::to_string(i) + " score outside (0,1]");
  }
  if (!out.empty()) return out;

  // Vertices an edge touches must lie on some 0 -> T path.
  int t = vertex_count - 1;
  std::vector<bool> fwd(vertex_count, false), bwd(vertex_count, false);
  fwd[0] = true;
  bwd[t] = true;
  for (bool changed = true; changed;) {  // edges are forward; sweep to fixpoint
    changed = false;
    for (const auto& e : edges) {
      if (fwd[e.from] && !fwd[e.to]) fwd[e.to] = changed = true;
      if (bwd[e.to] && !bwd[e.from]) bwd[e.from] = changed = true;
    }
  }
  std::set<int> used;
  for (const auto& e : edges) {
    used.insert(e.from);
    used.insert(e.to);
  }
  for (int v : used)
    if (!fwd[v] || !bwd[v])
      out.push_back(label + " dead vertex " + std::to_string(v) +
                    ": on no path from 0 to " + std::to_string(t));
  if (!edges.empty() && (!used.count(0) || !used.count(t)))
    out.push_back(label + " no edge touches a boundary vertex");
  return out;
}

// Keep only edges lying on some 0 -> T path.
template <typename Edge>
std::vector<Edge> prune_to_full_paths(int vertex_count, std::vector<Edge> edges) {
  int t = vertex_count - 1;
  std::vector<bool> fwd(vertex_count, false), bwd(vertex_count, false);
  fwd[0] = true;
  bwd[t] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : edges) {
      if (fwd[e.from] && !fwd[e.to]) fwd[e.to] = changed = true;
      if (bwd[e.to] && !bwd[e.from]) bwd[e.from] = changed = true;
    }
  }
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const Edge& e) { return !fwd[e.from] || !bwd[e.to]; }),
              edges.end());
  return edges;
}

}  // namespace

std::vector<std::string> validate_lattice(const PhonemeLattice& l) {
  return validate_edges(l.vertex_count, l.edges, "phoneme");
}

std::vector<std::string> validate_lattice(const MorphemeLattice& l) {
  return validate_edges(l.vertex_count, l.edges, "morpheme");
}

MorphemeLattice decode_lattice(const PhonemeLattice& pl, const PhonemeTrie& trie,
                               const DecodeOptions& opts) {
  auto violations = validate_lattice(pl);
  if (!violations.empty()) throw Error("decode input: " + violations.front());

  std::vector<std::vector<const PhonemeEdge*>> out_edges(pl.vertex_count);
  for (const auto& e : pl.edges) out_edges[e.from].push_back(&e);
  for (auto& v : out_edges)
    std::sort(v.begin(), v.end(), [](const PhonemeEdge* a, const PhonemeEdge* b) {
      return std::tie(a->to, a->symbol) < std::tie(b->to, b->symbol);
    });

  // (start, end, entry) -> best product, with length for optional
  // normalization.
  std::map<std::tuple<int, int, std::string>, std::pair<double, int>> best;

  struct State {
    int vertex;
    int node;
    double score;
    int depth;
  };
  for (int start = 0; start + 1 < pl.vertex_count; ++start) {
    std::vector<State> stack{{start, 0, 1.0, 0}};
    while (!stack.empty()) {
      State s = stack.back();
      stack.pop_back();
      for (const PhonemeEdge* e : out_edges[s.vertex]) {
        int node = trie.step(s.node, e->symbol);
        if (node < 0) continue;
        double score = s.score * e->score;
        int depth = s.depth + 1;
        for (const auto& id : trie.at(node).entries) {
          auto key = std::make_tuple(start, e->to, id);
          auto it = best.find(key);
          if (it == best.end() || score > it->second.first)
            best[key] = {score, depth};
        }
        stack.push_back({e->to, node, score, depth});
      }
    }
  }

  MorphemeLattice ml;
  ml.vertex_count = pl.vertex_count;
  for (const auto& [key, val] : best) {
    auto [from, to, id] = key;
    double score = opts.length_normalize ? std::pow(val.first, 1.0 / val.second) : val.first;
    ml.edges.push_back({from, to, id, score});
  }
  ml.edges = prune_to_full_paths(ml.vertex_count, std::move(ml.edges));
  return ml;
}

MorphemeLattice filter_lattice(const MorphemeLattice& ml, const ConnectivityMatrix& conn,
                               const Lexicon& lex) {
  int t = ml.vertex_count - 1;
  std::vector<MorphemeEdge> edges = ml.edges;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<MorphemeEdge> kept;
    kept.reserve(edges.size());
    for (const auto& e : edges) {
      const std::string& cls = lex.class_of(e.entry_id);
      bool ok = true;
      if (e.from == 0) {
        ok = conn.start_classes.count(cls) > 0;
      } else {
        ok = std::any_of(edges.begin(), edges.end(), [&](const MorphemeEdge& p) {
          return p.to == e.from && conn.connectable(lex.class_of(p.entry_id), cls);
        });
      }
      if (ok) {
        if (e.to == t) {
          ok = conn.end_classes.count(cls) > 0;
        } else {
          ok = std::any_of(edges.begin(), edges.end(), [&](const MorphemeEdge& s) {
            return s.from == e.to && conn.connectable(cls, lex.class_of(s.entry_id));
          });
        }
      }
      if (ok)
        kept.push_back(e);
      else
        changed = true;
    }
    edges = std::move(kept);
  }
  return {ml.vertex_count, std::move(edges)};
}

bool contains_path(const MorphemeLattice& ml, const GoldPath& gold) {
  for (const auto& step : gold) {
    bool found = std::any_of(ml.edges.begin(), ml.edges.end(), [&](const MorphemeEdge& e) {
      return e.from == step.from && e.to == step.to && e.entry_id == step.entry_id;
    });
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// File format

LatticeFile load_lattice(std::istream& in, const std::string& source_name) {
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw Error(source_name + ":" + std::to_string(lineno) + ": " + what);
  };

  int vertex_count = -1;
  std::string kind;
  std::vector<std::tuple<int, int, std::string, double>> edges;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::stringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    if (word == "lattice") {
      std::string kindfield;
      if (!(ss >> vertex_count >> kindfield)) fail("lattice needs <vertex_count> kind=...");
      if (kindfield.rfind("kind=", 0) != 0) fail("expected kind=phoneme|morpheme");
      kind = kindfield.substr(5);
      if (kind != "phoneme" && kind != "morpheme") fail("unknown lattice kind: " + kind);
    } else if (word == "edge") {
      if (vertex_count < 0) fail("edge before lattice header");
      int from, to;
      std::string sym;
      double score;
      if (!(ss >> from >> to >> sym >> score)) fail("edge needs <from> <to> <sym> <score>");
      edges.emplace_back(from, to, sym, score);
    } else {
      fail("unknown directive: " + word);
    }
  }
  if (vertex_count < 0) fail("missing lattice header");

  LatticeFile out;
  if (kind == "phoneme") {
    PhonemeLattice l;
    l.vertex_count = vertex_count;
    for (auto& [f, t, s, sc] : edges) l.edges.push_back({f, t, s, sc});
    auto violations = validate_lattice(l);
    if (!violations.empty()) throw Error(source_name + ": " + violations.front());
    out.phoneme = std::move(l);
  } else {
    MorphemeLattice l;
    l.vertex_count = vertex_count;
    for (auto& [f, t, s, sc] : edges) l.edges.push_back({f, t, s, sc});
    auto violations = validate_lattice(l);
    if (!violations.empty()) throw Error(source_name + ": " + violations.front());
    out.morpheme = std::move(l);
  }
  return out;
}

LatticeFile load_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lattice file: " + path);
  return load_lattice(in, path);
}

namespace {

std::string format_score(double score) {
  std::ostringstream ss;
  ss.precision(17);
  ss << score;
  return ss.str();
}

}  // namespace

void write_lattice(std::ostream& out, const PhonemeLattice& l) {
  out << "lattice " << l.vertex_count << " kind=phoneme\n";
  for (const auto& e : l.edges)
    out << "edge " << e.from << " " << e.to << " " << e.symbol << " "
        << format_score(e.score) << "\n";
}

void write_lattice(std::ostream& out, const MorphemeLattice& l) {
  out << "lattice " << l.vertex_count << " kind=morpheme\n";
  for (const auto& e : l.edges)
    out << "edge " << e.from << " " << e.to << " " << e.entry_id << " "
        << format_score(e.score) << "\n";
}

LexicalCandidates lexical_candidates(const MorphemeLattice& ml, const Lexicon& lex) {
  int t = ml.vertex_count - 1;
  LexicalCandidates out;
  out.categories.resize(ml.edges.size());

  // Neighbor classes per vertex, from the lattice itself.
  std::vector<std::set<std::string>> ending_at(ml.vertex_count), starting_at(ml.vertex_count);
  for (const auto& e : ml.edges) {
    ending_at[e.to].insert(lex.class_of(e.entry_id));
    starting_at[e.from].insert(lex.class_of(e.entry_id));
  }

  for (size_t i = 0; i < ml.edges.size(); ++i) {
    const auto& e = ml.edges[i];
    const MorphemeEntry& entry = lex.entry(e.entry_id);
    std::set<std::string> lefts = ending_at[e.from];
    if (e.from == 0) lefts.insert(kBoundary);
    std::set<std::string> rights = starting_at[e.to];
    if (e.to == t) rights.insert(kBoundary);

    std::vector<CatPtr> cats;
    for (const auto& l : lefts)
      for (const auto& r : rights)
        for (const auto& c : assign_categories(entry, l, r))
          cats.push_back(c);
    std::sort(cats.begin(), cats.end(),
              [](const CatPtr& a, const CatPtr& b) { return render(a) < render(b); });
    cats.erase(std::unique(cats.begin(), cats.end(),
                           [](const CatPtr& a, const CatPtr& b) { return equal(a, b); }),
               cats.end());
    out.categories[i] = std::move(cats);
  }
  return out;
}

}  // namespace c3
