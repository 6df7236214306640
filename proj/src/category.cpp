#include "c3/category.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace c3 {

CatPtr Category::basic(std::string name, std::vector<std::string> features) {
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  auto c = std::make_shared<Category>();
  c->kind = CatKind::Basic;
  c->name = std::move(name);
  c->features = std::move(features);
  return c;
}

CatPtr Category::functor(CatPtr result, ArgDir dir, ArgumentSet args) {
  if (!args.is_variable()) {
    if (args.members.empty()) return result;
    std::sort(args.members.begin(), args.members.end(),
              [](const CatPtr& a, const CatPtr& b) { return render(a) < render(b); });
  }
  auto c = std::make_shared<Category>();
  c->kind = CatKind::Functor;
  c->result = std::move(result);
  c->dir = dir;
  c->args = std::move(args);
  return c;
}

CatPtr Category::functor(CatPtr result, ArgDir dir, std::vector<CatPtr> members) {
  ArgumentSet s;
  s.members = std::move(members);
  return functor(std::move(result), dir, std::move(s));
}

CatPtr Category::variable_functor(CatPtr result, ArgDir dir, std::string var) {
  ArgumentSet s;
  s.var = std::move(var);
  return functor(std::move(result), dir, std::move(s));
}

CatPtr Category::suppressed(CatPtr inner) {
  if (inner->kind == CatKind::Suppressed)
    throw Error("double suppression: (" + render(inner) + ")|");
  auto c = std::make_shared<Category>();
  c->kind = CatKind::Suppressed;
  c->inner = std::move(inner);
  return c;
}

bool operator==(const Category& a, const Category& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CatKind::Basic:
      return a.name == b.name && a.features == b.features;
    case CatKind::Suppressed:
      return *a.inner == *b.inner;
    case CatKind::Functor: {
      if (a.dir != b.dir || !(*a.result == *b.result)) return false;
      if (a.args.is_variable() || b.args.is_variable())
        return a.args.var == b.args.var;
      if (a.args.members.size() != b.args.members.size()) return false;
      for (size_t i = 0; i < a.args.members.size(); ++i)
        if (!(*a.args.members[i] == *b.args.members[i])) return false;
      return true;
    }
  }
  return false;
}

bool equal(const CatPtr& a, const CatPtr& b) { return a == b || *a == *b; }

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_to(const CatPtr& c, std::string& out);

// Functor results and single-member arguments keep parentheses only where
// re-parsing needs them; multisets render braced with members in sorted
// (construction) order.
void render_child(const CatPtr& c, bool parenthesize_functor, std::string& out) {
  bool parens = false;
  if (c->kind == CatKind::Functor) parens = parenthesize_functor;
  if (c->kind == CatKind::Suppressed && c->inner->kind == CatKind::Functor)
    parens = false;  // renders as "(...)|" already
  if (parens) out += '(';
  render_to(c, out);
  if (parens) out += ')';
}

void render_to(const CatPtr& c, std::string& out) {
  switch (c->kind) {
    case CatKind::Basic:
      out += c->name;
      if (!c->features.empty()) {
        out += '[';
        for (size_t i = 0; i < c->features.size(); ++i) {
          if (i) out += ',';
          out += c->features[i];
        }
        out += ']';
      }
      return;
    case CatKind::Suppressed:
      if (c->inner->kind == CatKind::Basic) {
        render_to(c->inner, out);
      } else {
        out += '(';
        render_to(c->inner, out);
        out += ')';
      }
      out += '|';
      return;
    case CatKind::Functor: {
      render_child(c->result, /*parenthesize_functor=*/true, out);
      out += c->dir == ArgDir::Rightward ? '/' : '\\';
      if (c->args.is_variable()) {
        out += '$';
        out += c->args.var;
      } else if (c->args.members.size() == 1) {
        const CatPtr& m = c->args.members[0];
        if (m->kind == CatKind::Basic) {
          render_to(m, out);
        } else {
          out += '(';
          render_to(m, out);
          out += ')';
        }
      } else {
        out += '{';
        for (size_t i = 0; i < c->args.members.size(); ++i) {
          if (i) out += ',';
          render_to(c->args.members[i], out);
        }
        out += '}';
      }
      return;
    }
  }
}

}  // namespace

std::string render(const CatPtr& c) {
  std::string out;
  render_to(c, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   cat        := functor
//   functor    := primary (("/" | "\") argspec)*        (left-associative)
//   primary    := (atom | "(" cat ")") "|"?             ('|' binds tightest)
//   argspec    := primary | "{" cat ("," cat)* "}" | "$" NAME
//   atom       := NAME ("[" NAME ("," NAME)* "]")?
//   NAME       := [A-Za-z][A-Za-z0-9_-]*

namespace {

struct CatParser {
  const std::string& text;
  size_t pos = 0;

  explicit CatParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) {
    throw Error("category syntax: " + what + " at offset " +
                std::to_string(pos) + " in \"" + text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  static bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string name() {
    skip_ws();
    if (pos >= text.size() || !name_start(text[pos])) fail("expected name");
    size_t start = pos;
    while (pos < text.size() && name_char(text[pos])) ++pos;
    return text.substr(start, pos - start);
  }

  CatPtr atom() {
    std::string n = name();
    std::vector<std::string> feats;
    if (eat('[')) {
      feats.push_back(name());
      while (eat(',')) feats.push_back(name());
      expect(']');
    }
    return Category::basic(std::move(n), std::move(feats));
  }

  CatPtr primary() {
    CatPtr c;
    if (eat('(')) {
      c = cat();
      expect(')');
    } else {
      c = atom();
    }
    if (eat('|')) c = Category::suppressed(c);
    return c;
  }

  CatPtr cat() {
    CatPtr c = primary();
    for (;;) {
      char op = peek();
      if (op != '/' && op != '\\') return c;
      ++pos;
      ArgDir dir = op == '/' ? ArgDir::Rightward : ArgDir::Leftward;
      if (eat('$')) {
        c = Category::variable_functor(c, dir, name());
      } else if (eat('{')) {
        std::vector<CatPtr> members;
        members.push_back(cat());
        while (eat(',')) members.push_back(cat());
        expect('}');
        c = Category::functor(c, dir, std::move(members));
      } else {
        c = Category::functor(c, dir, std::vector<CatPtr>{primary()});
      }
    }
  }
};

}  // namespace

CatPtr parse_category(const std::string& text) {
  CatParser p(text);
  CatPtr c = p.cat();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return c;
}

// ---------------------------------------------------------------------------
// Unification

namespace {

bool merge_binding(Bindings& b, const std::string& var, const std::vector<CatPtr>& members) {
  auto it = b.find(var);
  if (it == b.end()) {
    b.emplace(var, members);
    return true;
  }
  const auto& prev = it->second;
  if (prev.size() != members.size()) return false;
  for (size_t i = 0; i < prev.size(); ++i)
    if (!equal(prev[i], members[i])) return false;
  return true;
}

bool unify_into(const CatPtr& pattern, const CatPtr& concrete, Bindings& b);

// Multiset matching: find a bijection pairing each pattern member with a
// distinct concrete member. Sets are tiny; plain backtracking.
bool unify_members(const std::vector<CatPtr>& pat, const std::vector<CatPtr>& con,
                   std::vector<bool>& used, size_t i, Bindings& b) {
  if (i == pat.size()) return true;
  for (size_t j = 0; j < con.size(); ++j) {
    if (used[j]) continue;
    Bindings saved = b;
    if (unify_into(pat[i], con[j], b)) {
      used[j] = true;
      if (unify_members(pat, con, used, i + 1, b)) return true;
      used[j] = false;
    }
    b = std::move(saved);
  }
  return false;
}

bool unify_into(const CatPtr& pattern, const CatPtr& concrete, Bindings& b) {
  if (pattern->kind != concrete->kind) return false;
  switch (pattern->kind) {
    case CatKind::Basic:
      return pattern->name == concrete->name && pattern->features == concrete->features;
    case CatKind::Suppressed:
      return unify_into(pattern->inner, concrete->inner, b);
    case CatKind::Functor: {
      if (pattern->dir != concrete->dir) return false;
      if (!unify_into(pattern->result, concrete->result, b)) return false;
      if (concrete->args.is_variable()) return false;  // concrete side must be ground
      if (pattern->args.is_variable())
        return merge_binding(b, pattern->args.var, concrete->args.members);
      if (pattern->args.members.size() != concrete->args.members.size()) return false;
      std::vector<bool> used(concrete->args.members.size(), false);
      return unify_members(pattern->args.members, concrete->args.members, used, 0, b);
    }
  }
  return false;
}

}  // namespace

std::optional<Bindings> unify(const CatPtr& pattern, const CatPtr& concrete) {
  Bindings b;
  if (unify_into(pattern, concrete, b)) return b;
  return std::nullopt;
}

CatPtr normalize(const CatPtr& c, const Bindings& b) {
  switch (c->kind) {
    case CatKind::Basic:
      return c;
    case CatKind::Suppressed: {
      CatPtr inner = normalize(c->inner, b);
      if (inner == c->inner) return c;
      return Category::suppressed(inner);
    }
    case CatKind::Functor: {
      CatPtr result = normalize(c->result, b);
      if (c->args.is_variable()) {
        auto it = b.find(c->args.var);
        if (it == b.end()) {
          if (result == c->result) return c;
          return Category::variable_functor(result, c->dir, c->args.var);
        }
        std::vector<CatPtr> members;
        members.reserve(it->second.size());
        for (const auto& m : it->second) members.push_back(normalize(m, b));
        return Category::functor(result, c->dir, std::move(members));
      }
      std::vector<CatPtr> members;
      members.reserve(c->args.members.size());
      for (const auto& m : c->args.members) members.push_back(normalize(m, b));
      return Category::functor(result, c->dir, std::move(members));
    }
  }
  return c;
}

bool has_variables(const CatPtr& c) {
  switch (c->kind) {
    case CatKind::Basic:
      return false;
    case CatKind::Suppressed:
      return has_variables(c->inner);
    case CatKind::Functor:
      if (c->args.is_variable()) return true;
      if (has_variables(c->result)) return true;
      for (const auto& m : c->args.members)
        if (has_variables(m)) return true;
      return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Cancellation

namespace {

// One cancellation direction: `functor` consumes `operand` from the side its
// slashes point at. Tries every distinct slot; bindings from the matched slot
// apply to the whole remaining category.
void cancel(const CatPtr& functor, const CatPtr& operand, CancelRule rule,
            std::vector<CombineResult>& out) {
  if (functor->kind != CatKind::Functor) return;
  if (rule == CancelRule::RightCancel && functor->dir != ArgDir::Rightward) return;
  if (rule == CancelRule::LeftCancel && functor->dir != ArgDir::Leftward) return;
  if (functor->args.is_variable()) return;  // no enumerable slots

  const auto& members = functor->args.members;
  for (size_t i = 0; i < members.size(); ++i) {
    if (i > 0 && equal(members[i], members[i - 1])) continue;  // duplicate slot
    auto b = unify(members[i], operand);
    if (!b) continue;
    std::vector<CatPtr> rest;
    rest.reserve(members.size() - 1);
    for (size_t j = 0; j < members.size(); ++j)
      if (j != i) rest.push_back(members[j]);
    CatPtr reduced = Category::functor(functor->result, functor->dir, std::move(rest));
    out.push_back({normalize(reduced, *b), rule});
  }
}

}  // namespace

std::vector<CombineResult> combine(const CatPtr& left, const CatPtr& right) {
  std::vector<CombineResult> out;
  cancel(left, right, CancelRule::RightCancel, out);
  cancel(right, left, CancelRule::LeftCancel, out);

  std::sort(out.begin(), out.end(), [](const CombineResult& a, const CombineResult& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    return render(a.category) < render(b.category);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const CombineResult& a, const CombineResult& b) {
                          return a.rule == b.rule && equal(a.category, b.category);
                        }),
            out.end());
  return out;
}

CatClass classify(const CatPtr& c) {
  if (c->kind == CatKind::Suppressed) return CatClass::SuppressedKind;
  if (c->kind == CatKind::Functor && !c->args.is_variable() &&
      c->result->kind != CatKind::Suppressed) {
    for (const auto& m : c->args.members)
      if (m->kind == CatKind::Suppressed) return CatClass::Activator;
  }
  return CatClass::Ordinary;
}

}  // namespace c3
