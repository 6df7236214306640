#include "c3/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace c3 {

bool cond_matches(const ContextCond& cond, const std::string& neighbor_class) {
  switch (cond.kind) {
    case ContextCond::Any:
      return true;
    case ContextCond::Boundary:
      return neighbor_class == kBoundary;
    case ContextCond::Classes:
      return cond.classes.count(neighbor_class) > 0;
  }
  return false;
}

const MorphemeEntry& Lexicon::entry(const std::string& id) const {
  auto it = entries.find(id);
  if (it == entries.end()) throw Error("unknown morpheme id: " + id);
  return it->second;
}

const std::string& Lexicon::class_of(const std::string& entry_id) const {
  return entry(entry_id).morph_class;
}

void PhonemeTrie::insert(const std::vector<std::string>& surface, const std::string& entry_id) {
  int node = 0;
  for (const auto& sym : surface) {
    auto it = nodes_[node].next.find(sym);
    if (it == nodes_[node].next.end()) {
      nodes_.emplace_back();
      it = nodes_[node].next.emplace(sym, static_cast<int>(nodes_.size()) - 1).first;
    }
    node = it->second;
  }
  auto& ids = nodes_[node].entries;
  auto pos = std::lower_bound(ids.begin(), ids.end(), entry_id);
  if (pos == ids.end() || *pos != entry_id) ids.insert(pos, entry_id);
}

int PhonemeTrie::step(int node, const std::string& symbol) const {
  auto it = nodes_[node].next.find(symbol);
  return it == nodes_[node].next.end() ? -1 : it->second;
}

std::vector<std::string> PhonemeTrie::lookup(const std::vector<std::string>& seq) const {
  int node = 0;
  for (const auto& sym : seq) {
    node = step(node, sym);
    if (node < 0) return {};
  }
  return nodes_[node].entries;
}

PhonemeTrie build_trie(const Lexicon& lex) {
  PhonemeTrie trie;
  for (const auto& [id, entry] : lex.entries) trie.insert(entry.surface, id);
  return trie;
}

std::vector<CatPtr> assign_categories(const MorphemeEntry& entry,
                                      const std::string& left_class,
                                      const std::string& right_class) {
  for (const auto& v : entry.variants)
    if (cond_matches(v.left, left_class) && cond_matches(v.right, right_class))
      return {v.category};
  return {};
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct LexParser {
  std::string source;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw Error(source + ":" + std::to_string(lineno) + ": " + what);
  }

  ContextCond parse_cond(const std::string& text, const Lexicon& lex) {
    if (text == "ANY") return ContextCond::any();
    if (text == "BOUNDARY") return ContextCond::boundary();
    std::set<std::string> classes;
    std::stringstream ss(text);
    std::string c;
    while (std::getline(ss, c, ',')) {
      if (c.empty()) fail("empty class in condition '" + text + "'");
      if (!lex.classes.count(c)) fail("undeclared class in condition: " + c);
      classes.insert(c);
    }
    if (classes.empty()) fail("empty condition");
    return ContextCond::of(std::move(classes));
  }
};

bool is_bound_class(const std::string& cls) {
  auto ends_with = [&](const char* suf) {
    std::string s(suf);
    return cls.size() >= s.size() && cls.compare(cls.size() - s.size(), s.size(), s) == 0;
  };
  return ends_with("suffix") || ends_with("ending");
}

// A variant expecting a bound morpheme on its right must carry a Suppressed
// category or one with a Suppressed result; a variant for the pre-boundary
// position must be Ordinary or an Activator. Keeps the two lexicon styles
// (with and without suppression) internally coherent.
void check_suppression_conventions(const Lexicon& lex, const std::string& source) {
  for (const auto& [id, entry] : lex.entries) {
    for (const auto& v : entry.variants) {
      bool right_bound = v.right.kind == ContextCond::Classes &&
                         std::any_of(v.right.classes.begin(), v.right.classes.end(),
                                     is_bound_class);
      CatClass cls = classify(v.category);
      bool suppressed_result =
          v.category->kind == CatKind::Functor &&
          v.category->result->kind == CatKind::Suppressed;
      if (right_bound && cls != CatClass::SuppressedKind && !suppressed_result)
        throw Error(source + ": morpheme " + id +
                    ": variant before a bound class must have a suppressed "
                    "category or suppressed result, got " + render(v.category));
      if (v.right.kind == ContextCond::Boundary && cls == CatClass::SuppressedKind)
        throw Error(source + ": morpheme " + id +
                    ": pre-boundary variant cannot be suppressed: " + render(v.category));
    }
  }
}

}  // namespace

Lexicon load_lexicon(std::istream& in, const std::string& source_name) {
  Lexicon lex;
  LexParser p{source_name};
  MorphemeEntry* current = nullptr;
  std::string raw;

  while (std::getline(in, raw)) {
    ++p.lineno;
    bool indented = !raw.empty() && (raw[0] == ' ' || raw[0] == '\t');
    std::string line = raw.substr(0, raw.find('#'));
    std::stringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;

    if (word == "phonemes") {
      std::string sym;
      while (ss >> sym) lex.phonemes.insert(sym);
    } else if (word == "class") {
      std::string name;
      if (!(ss >> name)) p.fail("class needs a name");
      lex.classes.insert(name);
    } else if (word == "connect") {
      std::string l, r;
      if (!(ss >> l >> r)) p.fail("connect needs two classes");
      if (!lex.classes.count(l)) p.fail("undeclared class: " + l);
      if (!lex.classes.count(r)) p.fail("undeclared class: " + r);
      lex.connectivity.pairs.insert({l, r});
    } else if (word == "boundary") {
      std::string which, c;
      if (!(ss >> which)) p.fail("boundary needs start|end");
      auto* set = which == "start" ? &lex.connectivity.start_classes
                 : which == "end"  ? &lex.connectivity.end_classes
                                   : nullptr;
      if (!set) p.fail("boundary needs start|end, got " + which);
      while (ss >> c) {
        if (!lex.classes.count(c)) p.fail("undeclared class: " + c);
        set->insert(c);
      }
    } else if (word == "morpheme") {
      std::string id, cls, surface;
      if (!(ss >> id >> cls >> surface)) p.fail("morpheme needs id, class, /surface/");
      if (!lex.classes.count(cls)) p.fail("undeclared class: " + cls);
      if (lex.entries.count(id)) p.fail("duplicate morpheme id: " + id);
      if (surface.size() < 2 || surface.front() != '/' || surface.back() != '/')
        p.fail("surface must be /p,p,.../, got " + surface);
      MorphemeEntry entry;
      entry.id = id;
      entry.morph_class = cls;
      std::stringstream syms(surface.substr(1, surface.size() - 2));
      std::string sym;
      while (std::getline(syms, sym, ',')) {
        if (sym.empty()) p.fail("empty phoneme in surface " + surface);
        if (!lex.phonemes.count(sym)) p.fail("phoneme not in inventory: " + sym);
        entry.surface.push_back(sym);
      }
      if (entry.surface.empty()) p.fail("empty surface for morpheme " + id);
      current = &lex.entries.emplace(id, std::move(entry)).first->second;
    } else if (word == "variant") {
      if (!current || !indented) p.fail("variant line outside a morpheme block");
      Variant v;
      bool have_cat = false;
      std::string field;
      while (ss >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) p.fail("expected key=value, got " + field);
        std::string key = field.substr(0, eq);
        std::string val = field.substr(eq + 1);
        if (key == "left") {
          v.left = p.parse_cond(val, lex);
        } else if (key == "right") {
          v.right = p.parse_cond(val, lex);
        } else if (key == "cat") {
          v.category = parse_category(val);
          have_cat = true;
        } else {
          p.fail("unknown variant field: " + key);
        }
      }
      if (!have_cat) p.fail("variant needs cat=");
      current->variants.push_back(std::move(v));
    } else {
      p.fail("unknown directive: " + word);
    }
  }

  for (const auto& [id, entry] : lex.entries)
    if (entry.variants.empty())
      throw Error(source_name + ": morpheme " + id + " has no variants");

  check_suppression_conventions(lex, source_name);
  return lex;
}

Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);
  return load_lexicon(in, path);
}

}  // namespace c3
