#include "c3/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace c3 {

// ---------------------------------------------------------------------------
// Parameters

RelaxationParams load_params(std::istream& in, RelaxationParams base,
                             const std::string& source_name) {
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::stringstream ss(line);
    std::string key, value;
    if (!(ss >> key)) continue;
    if (!(ss >> value))
      throw Error(source_name + ":" + std::to_string(lineno) + ": " + key + " needs a value");
    try {
      if (key == "rho") base.rho = std::stod(value);
      else if (key == "rho_prime") base.rho_prime = std::stod(value);
      else if (key == "d") base.d = std::stod(value);
      else if (key == "theta") base.theta = std::stod(value);
      else if (key == "phi") base.phi = std::stod(value);
      else if (key == "init_gamma") base.init_gamma = std::stod(value);
      else if (key == "epsilon") base.epsilon = std::stod(value);
      else if (key == "max_cycles") base.max_cycles = std::stoi(value);
      else if (key == "decay_mode") {
        if (value == "retention") base.decay_mode = DecayMode::Retention;
        else if (value == "literal") base.decay_mode = DecayMode::Literal;
        else throw Error("decay_mode must be retention|literal, got " + value);
      } else {
        throw Error("unknown parameter: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw Error(source_name + ":" + std::to_string(lineno) + ": bad number for " + key);
    }
  }
  return base;
}

RelaxationParams load_params_file(const std::string& path, RelaxationParams base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open params file: " + path);
  return load_params(in, base, path);
}

// ---------------------------------------------------------------------------
// Chart structure

int ChartNode::ca() const {
  if (kind == Kind::Lexical) return 0;
  bool any = false;
  for (const auto& p : support) {
    if (p.full()) return 2;
    any = true;
  }
  return any ? 1 : 0;
}

Chart::Key Chart::key_of(const ChartNode& n) {
  return {n.span, n.category_text, static_cast<int>(n.kind),
          n.kind == ChartNode::Kind::Phrasal ? static_cast<int>(n.orientation) : 0,
          n.entry_id};
}

std::vector<NodeId> Chart::all_nodes() const {
  std::vector<NodeId> out;
  for (const auto& [span, ids] : cells_)
    for (NodeId id : ids) out.push_back(id);
  return out;
}

std::vector<NodeId> Chart::cell(Span s) const {
  auto it = cells_.find(s);
  return it == cells_.end() ? std::vector<NodeId>{} : it->second;
}

bool Chart::cell_occupied(Span s) const {
  auto it = cells_.find(s);
  return it != cells_.end() && !it->second.empty();
}

namespace {

// Cell vectors stay sorted by node key so iteration order never depends on
// creation history.
void insert_sorted(std::vector<NodeId>& ids, NodeId id,
                   const std::vector<ChartNode>& nodes,
                   bool (*less)(const ChartNode&, const ChartNode&)) {
  auto pos = std::lower_bound(ids.begin(), ids.end(), id, [&](NodeId a, NodeId b) {
    return less(nodes[a], nodes[b]);
  });
  ids.insert(pos, id);
}

bool node_less(const ChartNode& a, const ChartNode& b) {
  return std::tie(a.category_text, a.kind, a.orientation, a.entry_id) <
         std::tie(b.category_text, b.kind, b.orientation, b.entry_id);
}

}  // namespace

NodeId Chart::add_lexical(CatPtr category, Span span, const std::string& entry_id,
                          double source_score, double activation) {
  ChartNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.category = std::move(category);
  n.category_text = render(n.category);
  n.span = span;
  n.kind = ChartNode::Kind::Lexical;
  n.entry_id = entry_id;
  n.source_score = source_score;
  n.init_activation = activation;
  n.activation = activation;
  Key k = key_of(n);
  if (index_.count(k)) throw Error("duplicate lexical node: " + n.category_text);
  index_.emplace(std::move(k), n.id);
  nodes_.push_back(std::move(n));
  alive_.push_back(true);
  insert_sorted(cells_[span], nodes_.back().id, nodes_, node_less);
  return nodes_.back().id;
}

std::pair<NodeId, bool> Chart::add_phrasal(CatPtr category, Span span,
                                           CancelRule orientation, const SupportPair& pair,
                                           double birth_activation) {
  ChartNode probe;
  probe.category = category;
  probe.category_text = render(category);
  probe.span = span;
  probe.kind = ChartNode::Kind::Phrasal;
  probe.orientation = orientation;
  Key k = key_of(probe);

  auto it = index_.find(k);
  if (it != index_.end()) {
    ChartNode& n = nodes_[it->second];
    if (std::find(n.support.begin(), n.support.end(), pair) != n.support.end())
      return {n.id, false};  // re-derivation of a known pair
    n.support.push_back(pair);
    n.activation = std::min(1.0, std::max(n.activation, birth_activation));
    return {n.id, true};
  }

  probe.id = static_cast<NodeId>(nodes_.size());
  probe.activation = std::min(1.0, birth_activation);
  probe.support.push_back(pair);
  index_.emplace(std::move(k), probe.id);
  nodes_.push_back(std::move(probe));
  alive_.push_back(true);
  insert_sorted(cells_[span], nodes_.back().id, nodes_, node_less);
  return {nodes_.back().id, true};
}

void Chart::remove(NodeId id) {
  if (!alive_[id]) return;
  alive_[id] = false;
  const ChartNode& n = nodes_[id];
  index_.erase(key_of(n));
  auto cit = cells_.find(n.span);
  if (cit != cells_.end()) {
    auto& ids = cit->second;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
    if (ids.empty()) cells_.erase(cit);
  }
}

std::vector<NodeId> Chart::constituents(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& p : nodes_[id].support) {
    if (p.functor && alive_[*p.functor]) out.push_back(*p.functor);
    if (p.argument && alive_[*p.argument]) out.push_back(*p.argument);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<NodeId, std::vector<NodeId>> Chart::parent_map() const {
  std::map<NodeId, std::vector<NodeId>> parents;
  for (NodeId p : all_nodes())
    for (NodeId c : constituents(p)) parents[c].push_back(p);
  for (auto& [c, ps] : parents) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }
  return parents;
}

// ---------------------------------------------------------------------------
// Initialization

Chart init_chart(const MorphemeLattice& ml, const Lexicon& lex, const Grammar& g) {
  (void)g;
  if (ml.edges.empty()) throw Error("cannot build a chart from an empty lattice");
  auto violations = validate_lattice(ml);
  if (!violations.empty()) throw Error("chart input: " + violations.front());

  LexicalCandidates cands = lexical_candidates(ml, lex);

  double max_score = 0.0;
  for (size_t i = 0; i < ml.edges.size(); ++i)
    if (!cands.categories[i].empty()) max_score = std::max(max_score, ml.edges[i].score);

  Chart chart;
  chart.vertex_count = ml.vertex_count;
  for (size_t i = 0; i < ml.edges.size(); ++i) {
    const auto& e = ml.edges[i];
    if (cands.categories[i].empty()) {
      chart.diagnostics.push_back("edge " + e.entry_id + " [" + std::to_string(e.from) +
                                  "," + std::to_string(e.to) +
                                  "] has no applicable variant; skipped");
      continue;
    }
    double activation = e.score / max_score;
    for (const auto& cat : cands.categories[i])
      chart.add_lexical(cat, {e.from, e.to}, e.entry_id, e.score, activation);
  }
  return chart;
}

// ---------------------------------------------------------------------------
// Relaxation steps

std::vector<ParentOption> allowed_parent_spans(const Chart& chart, NodeId n) {
  const Span s = chart.node(n).span;
  std::vector<ParentOption> out;
  for (int k = 0; k < s.from; ++k)
    if (chart.cell_occupied({k, s.from})) out.push_back({{k, s.to}, {k, s.from}});
  for (int k = s.to + 1; k < chart.vertex_count; ++k)
    if (chart.cell_occupied({s.to, k})) out.push_back({{s.from, k}, {s.to, k}});
  return out;
}

namespace {

double birth_activation(const RelaxationParams& p, double mean_constituents) {
  return std::min(1.0, p.init_gamma * mean_constituents);
}

// Expectation categories: the functor with one argument slot consumed, for
// every slot whose removal leaves no unbound variable.
std::vector<CatPtr> expectation_categories(const CatPtr& functor) {
  std::vector<CatPtr> out;
  if (functor->kind != CatKind::Functor || functor->args.is_variable()) return out;
  const auto& members = functor->args.members;
  for (size_t i = 0; i < members.size(); ++i) {
    if (i > 0 && equal(members[i], members[i - 1])) continue;
    std::vector<CatPtr> rest;
    for (size_t j = 0; j < members.size(); ++j)
      if (j != i) rest.push_back(members[j]);
    CatPtr reduced = normalize(Category::functor(functor->result, functor->dir, std::move(rest)));
    if (!has_variables(reduced)) out.push_back(reduced);
  }
  return out;
}

}  // namespace

int add_nodes_step(Chart& chart, const RelaxationParams& p) {
  // Snapshot: nodes created this step neither spawn nor partner until the
  // next cycle.
  const std::vector<NodeId> snapshot = chart.all_nodes();
  std::map<Span, std::vector<NodeId>> cells;
  for (NodeId id : snapshot) cells[chart.node(id).span].push_back(id);

  int changed = 0;
  for (NodeId nid : snapshot) {
    if (chart.node(nid).activation <= p.theta) continue;
    const Span ns = chart.node(nid).span;
    const CatPtr ncat = chart.node(nid).category;

    std::vector<ParentOption> options;
    for (int k = 0; k < ns.from; ++k)
      if (cells.count({k, ns.from})) options.push_back({{k, ns.to}, {k, ns.from}});
    for (int k = ns.to + 1; k < chart.vertex_count; ++k)
      if (cells.count({ns.to, k})) options.push_back({{ns.from, k}, {ns.to, k}});

    for (const auto& opt : options) {
      const bool partner_on_left = opt.partner.to == ns.from;

      for (NodeId qid : cells[opt.partner]) {
        NodeId left = partner_on_left ? qid : nid;
        NodeId right = partner_on_left ? nid : qid;
        for (const auto& res : combine(chart.node(left).category, chart.node(right).category)) {
          if (has_variables(res.category))
            throw Error("unbound variable in derived category: " + render(res.category));
          NodeId functor = res.rule == CancelRule::RightCancel ? left : right;
          NodeId argument = functor == left ? right : left;
          double birth = birth_activation(
              p, (chart.node(functor).activation + chart.node(argument).activation) / 2.0);
          auto [id, fresh] =
              chart.add_phrasal(res.category, opt.parent, res.rule,
                                SupportPair{functor, argument}, birth);
          (void)id;
          changed += fresh ? 1 : 0;
        }
      }

      // Expectation projection: the functor consumes from the abutting side
      // even when nothing in the (non-empty) partner cell combines yet.
      if (ncat->kind == CatKind::Functor) {
        bool consumes_here = partner_on_left ? ncat->dir == ArgDir::Leftward
                                             : ncat->dir == ArgDir::Rightward;
        if (consumes_here) {
          CancelRule orient = partner_on_left ? CancelRule::LeftCancel : CancelRule::RightCancel;
          for (const auto& cat : expectation_categories(ncat)) {
            double birth = birth_activation(p, chart.node(nid).activation);
            auto [id, fresh] = chart.add_phrasal(cat, opt.parent, orient,
                                                 SupportPair{nid, std::nullopt}, birth);
            (void)id;
            changed += fresh ? 1 : 0;
          }
        }
      }
    }
  }
  return changed;
}

std::vector<double> bottom_up_shares(double rho, double child_activation,
                                     const std::vector<double>& parent_activations) {
  const size_t n = parent_activations.size();
  std::vector<double> shares(n, 0.0);
  if (n == 0) return shares;
  double denom = 0.0;
  for (double a : parent_activations) denom += a * a;
  double total = static_cast<double>(n) * rho * child_activation;
  for (size_t i = 0; i < n; ++i)
    shares[i] = denom == 0.0 ? total / static_cast<double>(n)
                             : total * parent_activations[i] * parent_activations[i] / denom;
  return shares;
}

double top_down_share(double rho_prime, double activation, int constituent_count) {
  return rho_prime * activation / static_cast<double>(constituent_count);
}

double decayed_activation(DecayMode mode, double d, double activation, int ca, int cr) {
  double rate = mode == DecayMode::Retention ? d : 1.0 - d;
  return activation * rate * static_cast<double>(ca) / static_cast<double>(cr);
}

void spread_step(Chart& chart, const RelaxationParams& p) {
  const std::vector<NodeId> ids = chart.all_nodes();
  std::map<NodeId, double> a0;
  for (NodeId id : ids) a0[id] = chart.node(id).activation;

  auto parents = chart.parent_map();
  std::map<NodeId, double> delta;

  for (NodeId c : ids) {
    auto it = parents.find(c);
    if (it == parents.end() || it->second.empty()) continue;
    std::vector<double> pa;
    pa.reserve(it->second.size());
    for (NodeId pid : it->second) pa.push_back(a0[pid]);
    std::vector<double> shares = bottom_up_shares(p.rho, a0[c], pa);
    for (size_t i = 0; i < shares.size(); ++i) delta[it->second[i]] += shares[i];
  }

  for (NodeId pid : ids) {
    std::vector<NodeId> cs = chart.constituents(pid);
    if (cs.empty()) continue;
    double share = top_down_share(p.rho_prime, a0[pid], static_cast<int>(cs.size()));
    for (NodeId c : cs) delta[c] += share;
  }

  for (NodeId id : ids) {
    ChartNode& n = chart.node(id);
    if (n.kind == ChartNode::Kind::Lexical) {
      n.activation = n.init_activation;  // sources
    } else {
      auto it = delta.find(id);
      double a = a0[id] + (it == delta.end() ? 0.0 : it->second);
      n.activation = std::clamp(a, 0.0, 1.0);
    }
  }
}

namespace {

// Clear roles pointing at `dead` everywhere; returns phrasal nodes left with
// no support at all.
std::vector<NodeId> drop_links_to(Chart& chart, NodeId dead) {
  std::vector<NodeId> emptied;
  for (NodeId id : chart.all_nodes()) {
    ChartNode& n = chart.node(id);
    if (n.kind != ChartNode::Kind::Phrasal) continue;
    bool touched = false;
    for (auto& pair : n.support) {
      if (pair.functor == dead) {
        pair.functor.reset();
        touched = true;
      }
      if (pair.argument == dead) {
        pair.argument.reset();
        touched = true;
      }
    }
    if (!touched) continue;
    n.support.erase(std::remove_if(n.support.begin(), n.support.end(),
                                   [](const SupportPair& s) {
                                     return !s.functor && !s.argument;
                                   }),
                    n.support.end());
    std::sort(n.support.begin(), n.support.end(),
              [](const SupportPair& a, const SupportPair& b) {
                return std::tie(a.functor, a.argument) < std::tie(b.functor, b.argument);
              });
    n.support.erase(std::unique(n.support.begin(), n.support.end()), n.support.end());
    if (n.support.empty()) emptied.push_back(id);
  }
  return emptied;
}

}  // namespace

int decay_step(Chart& chart, const RelaxationParams& p) {
  for (NodeId id : chart.all_nodes()) {
    ChartNode& n = chart.node(id);
    if (n.kind != ChartNode::Kind::Phrasal) continue;
    n.activation = decayed_activation(p.decay_mode, p.d, n.activation, n.ca(), n.cr());
  }

  int removed = 0;
  std::set<NodeId> worklist;
  for (NodeId id : chart.all_nodes()) {
    const ChartNode& n = chart.node(id);
    if (n.kind == ChartNode::Kind::Phrasal && n.activation < p.phi) worklist.insert(id);
  }
  while (!worklist.empty()) {
    NodeId id = *worklist.begin();
    worklist.erase(worklist.begin());
    if (!chart.alive(id)) continue;
    chart.remove(id);
    ++removed;
    for (NodeId orphan : drop_links_to(chart, id)) worklist.insert(orphan);
  }
  return removed;
}

// ---------------------------------------------------------------------------
// Relaxation loop and readout

namespace {

// A node has a complete derivation iff it is lexical or some full support
// pair has two derivable constituents. Support links always point at strictly
// shorter spans, so a sweep by span length settles it.
std::map<NodeId, bool> derivable_set(const Chart& chart) {
  std::vector<NodeId> ids = chart.all_nodes();
  std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    const Span& sa = chart.node(a).span;
    const Span& sb = chart.node(b).span;
    return sa.to - sa.from < sb.to - sb.from;
  });
  std::map<NodeId, bool> derivable;
  for (NodeId id : ids) {
    const ChartNode& n = chart.node(id);
    if (n.kind == ChartNode::Kind::Lexical) {
      derivable[id] = true;
      continue;
    }
    bool ok = false;
    for (const auto& pair : n.support) {
      if (!pair.full()) continue;
      if (derivable[*pair.functor] && derivable[*pair.argument]) {
        ok = true;
        break;
      }
    }
    derivable[id] = ok;
  }
  return derivable;
}

bool category_accepted(const CatPtr& cat, const Grammar& g, const CatPtr& target) {
  if (target) return unify(target, cat).has_value();
  for (const auto& s : g.sentence_categories)
    if (unify(s, cat)) return true;
  return false;
}

}  // namespace

ParseForest run_relaxation(Chart& chart, const Grammar& g, const RelaxationParams& p,
                           const CatPtr& target, std::ostream* trace) {
  int quiet_streak = 0;
  for (int cycle = 0; cycle < p.max_cycles; ++cycle) {
    std::map<NodeId, double> before;
    for (NodeId id : chart.all_nodes()) before[id] = chart.node(id).activation;

    int added = add_nodes_step(chart, p);
    spread_step(chart, p);
    int removed = decay_step(chart, p);

    double max_delta = 0.0;
    for (NodeId id : chart.all_nodes()) {
      auto it = before.find(id);
      if (it != before.end())
        max_delta = std::max(max_delta, std::abs(chart.node(id).activation - it->second));
    }
    if (trace)
      *trace << "cycle " << (cycle + 1) << ": nodes=" << chart.all_nodes().size()
             << " added=" << added << " removed=" << removed << " max_delta=" << max_delta
             << "\n";
    quiet_streak = (added == 0 && removed == 0 && max_delta < p.epsilon) ? quiet_streak + 1 : 0;
    if (quiet_streak >= 3) break;
  }

  ParseForest forest;
  auto derivable = derivable_set(chart);
  Span full{0, chart.vertex_count - 1};
  for (NodeId id : chart.cell(full)) {
    if (!derivable[id]) continue;
    if (category_accepted(chart.node(id).category, g, target)) forest.roots.push_back(id);
  }
  return forest;
}

std::string tree_text(const TreePtr& t) {
  std::string out = "(" + render(t->category) + "[" + std::to_string(t->span.from) + "," +
                    std::to_string(t->span.to) + "] ";
  if (t->leaf())
    out += t->entry_id;
  else
    out += tree_text(t->left) + " " + tree_text(t->right);
  out += ")";
  return out;
}

std::vector<std::string> tree_leaves(const TreePtr& t) {
  if (t->leaf()) return {t->entry_id};
  auto out = tree_leaves(t->left);
  auto rights = tree_leaves(t->right);
  out.insert(out.end(), rights.begin(), rights.end());
  return out;
}

int tree_size(const TreePtr& t) {
  return t->leaf() ? 1 : 1 + tree_size(t->left) + tree_size(t->right);
}

namespace {

TreePtr extract_with(const Chart& chart, NodeId id, const std::map<NodeId, bool>& derivable) {
  const ChartNode& n = chart.node(id);
  auto tree = std::make_shared<ParseTree>();
  tree->category = n.category;
  tree->span = n.span;
  if (n.kind == ChartNode::Kind::Lexical) {
    tree->entry_id = n.entry_id;
    return tree;
  }

  const SupportPair* best = nullptr;
  double best_sum = 0.0;
  std::string best_left_text, best_right_text;
  int best_split = 0;
  for (const auto& pair : n.support) {
    if (!pair.full()) continue;
    if (!derivable.at(*pair.functor) || !derivable.at(*pair.argument)) continue;
    const ChartNode& f = chart.node(*pair.functor);
    const ChartNode& a = chart.node(*pair.argument);
    const ChartNode& l = f.span.from <= a.span.from ? f : a;
    const ChartNode& r = f.span.from <= a.span.from ? a : f;
    double sum = f.activation + a.activation;
    auto candidate = std::make_tuple(-sum, l.category_text, r.category_text, l.span.to);
    auto incumbent = std::make_tuple(-best_sum, best_left_text, best_right_text, best_split);
    if (!best || candidate < incumbent) {
      best = &pair;
      best_sum = sum;
      best_left_text = l.category_text;
      best_right_text = r.category_text;
      best_split = l.span.to;
    }
  }
  if (!best) throw Error("node has no complete derivation: " + n.category_text);

  TreePtr f = extract_with(chart, *best->functor, derivable);
  TreePtr a = extract_with(chart, *best->argument, derivable);
  if (f->span.from <= a->span.from) {
    tree->left = f;
    tree->right = a;
  } else {
    tree->left = a;
    tree->right = f;
  }
  return tree;
}

}  // namespace

TreePtr extract_tree(const Chart& chart, NodeId root) {
  return extract_with(chart, root, derivable_set(chart));
}

std::optional<TreePtr> best_parse(const Chart& chart, const ParseForest& forest) {
  if (forest.roots.empty()) return std::nullopt;
  auto derivable = derivable_set(chart);

  NodeId best = -1;
  TreePtr best_tree;
  std::string best_text;
  int best_size = 0;
  for (NodeId id : forest.roots) {
    TreePtr t = extract_with(chart, id, derivable);
    std::string text = tree_text(t);
    int size = tree_size(t);
    double a = chart.node(id).activation;
    bool take = best < 0;
    if (!take) {
      double ba = chart.node(best).activation;
      take = a > ba || (a == ba && (size < best_size || (size == best_size && text < best_text)));
    }
    if (take) {
      best = id;
      best_tree = t;
      best_text = text;
      best_size = size;
    }
  }
  return best_tree;
}

}  // namespace c3
