#include <cmath>
#include <sstream>

#include "c3/chart.hpp"
#include "c3/lexicon.hpp"
#include "doctest.h"

using namespace c3;

namespace {

const std::string kUascPath = std::string(C3_DATA_DIR) + "/lexicon-uasc.lex";

const Lexicon& uasc() {
  static Lexicon lex = load_lexicon_file(kUascPath);
  return lex;
}

// pha-il / tul / ul over phoneme positions 0..10.
MorphemeLattice suffixed_np_lattice() {
  MorphemeLattice ml;
  ml.vertex_count = 11;
  ml.edges = {{0, 5, "pha-il", 1.0}, {5, 8, "tul", 1.0}, {8, 10, "ul", 1.0}};
  return ml;
}

Grammar np_obj_grammar() {
  Grammar g;
  g.basic_names = {"np", "s"};
  g.sentence_categories = {parse_category("np[obj]")};
  return g;
}

// Minimal two-anchor chart: A=np[0,1], B=np\np[1,2], both directly settable.
struct TwoAnchor {
  Chart chart;
  NodeId a, b;
  TwoAnchor(double act_a, double act_b) {
    chart.vertex_count = 4;
    a = chart.add_lexical(parse_category("np"), {0, 1}, "A", act_a, act_a);
    b = chart.add_lexical(parse_category("np\\np"), {1, 2}, "B", act_b, act_b);
  }
};

NodeId find_node(const Chart& chart, const std::string& text, Span s) {
  for (NodeId id : chart.all_nodes())
    if (chart.node(id).category_text == text && chart.node(id).span == s) return id;
  return -1;
}

}  // namespace

TEST_CASE("spread and decay helpers reproduce worked values") {
  auto shares = bottom_up_shares(0.05, 1.0, {0.8, 0.4});
  REQUIRE(shares.size() == 2);
  CHECK(shares[0] == doctest::Approx(0.08).epsilon(1e-9));
  CHECK(shares[1] == doctest::Approx(0.02).epsilon(1e-9));

  CHECK(top_down_share(0.03, 0.9, 3) == doctest::Approx(0.009).epsilon(1e-9));

  CHECK(decayed_activation(DecayMode::Retention, 0.87, 0.5, 1, 2) ==
        doctest::Approx(0.21750).epsilon(1e-9));
  CHECK(decayed_activation(DecayMode::Literal, 0.87, 1.0, 2, 2) ==
        doctest::Approx(0.13).epsilon(1e-9));
}

TEST_CASE("bottom-up total is conserved and splits equally when parents are silent") {
  auto silent = bottom_up_shares(0.05, 1.0, {0.0, 0.0});
  CHECK(silent[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(silent[1] == doctest::Approx(0.05).epsilon(1e-12));

  auto shares = bottom_up_shares(0.05, 0.7, {0.9, 0.3, 0.1});
  double total = 0.0;
  for (double s : shares) total += s;
  CHECK(total == doctest::Approx(3 * 0.05 * 0.7).epsilon(1e-12));
  CHECK(shares[0] > shares[1]);
  CHECK(shares[1] > shares[2]);
  CHECK(bottom_up_shares(0.05, 1.0, {}).empty());
}

TEST_CASE("parameter files override defaults and reject junk") {
  std::istringstream in(
      "# tuning\n"
      "rho 0.10\n"
      "theta 0.4\n"
      "max_cycles 35\n"
      "decay_mode literal\n");
  RelaxationParams p = load_params(in);
  CHECK(p.rho == doctest::Approx(0.10));
  CHECK(p.theta == doctest::Approx(0.4));
  CHECK(p.max_cycles == 35);
  CHECK(p.decay_mode == DecayMode::Literal);
  // Untouched keys keep their defaults.
  CHECK(p.rho_prime == doctest::Approx(0.03));
  CHECK(p.d == doctest::Approx(0.87));
  CHECK(p.phi == doctest::Approx(0.066));
  CHECK(p.init_gamma == doctest::Approx(1.0));
  CHECK(p.epsilon == doctest::Approx(1e-4));

  std::istringstream bad_key("flux 3\n");
  CHECK_THROWS_AS(load_params(bad_key), Error);
  std::istringstream bad_mode("decay_mode sometimes\n");
  CHECK_THROWS_AS(load_params(bad_mode), Error);
  std::istringstream bad_value("rho much\n");
  CHECK_THROWS_AS(load_params(bad_value), Error);
}

TEST_CASE("chart initialization normalizes scores and reports inert edges") {
  // sa-kwa . {tul | mek} . ul; mek never sits before a noun ending, so that
  // edge contributes no lexical nodes.
  MorphemeLattice ml;
  ml.vertex_count = 11;
  ml.edges = {{0, 5, "sa-kwa", 0.5},
              {5, 8, "mek", 0.45},
              {5, 8, "tul", 0.4},
              {8, 10, "ul", 0.25}};
  Chart chart = init_chart(ml, uasc(), np_obj_grammar());

  REQUIRE(chart.diagnostics.size() == 1);
  CHECK(chart.diagnostics[0].find("mek") != std::string::npos);

  REQUIRE(chart.all_nodes().size() == 3);
  NodeId n0 = find_node(chart, "np|", {0, 5});
  NodeId n1 = find_node(chart, "np|\\(np|)", {5, 8});
  NodeId n2 = find_node(chart, "np[obj]\\(np|)", {8, 10});
  REQUIRE(n0 >= 0);
  REQUIRE(n1 >= 0);
  REQUIRE(n2 >= 0);
  // Normalized against the best candidate-bearing score (0.5), not 1.0.
  CHECK(chart.node(n0).activation == doctest::Approx(1.0));
  CHECK(chart.node(n1).activation == doctest::Approx(0.8));
  CHECK(chart.node(n2).activation == doctest::Approx(0.5));
  CHECK(chart.node(n0).source_score == doctest::Approx(0.5));
  CHECK(chart.node(n0).kind == ChartNode::Kind::Lexical);
  CHECK(chart.node(n0).entry_id == "sa-kwa");
  CHECK(chart.vertex_count == 11);

  MorphemeLattice empty;
  empty.vertex_count = 1;
  CHECK_THROWS_AS(init_chart(empty, uasc(), np_obj_grammar()), Error);
}

TEST_CASE("parent span options enumerate leftward then rightward partners") {
  Chart chart = init_chart(suffixed_np_lattice(), uasc(), np_obj_grammar());
  NodeId tul = find_node(chart, "np|\\(np|)", {5, 8});
  REQUIRE(tul >= 0);

  auto opts = allowed_parent_spans(chart, tul);
  REQUIRE(opts.size() == 2);
  CHECK(opts[0].parent == Span{0, 8});
  CHECK(opts[0].partner == Span{0, 5});
  CHECK(opts[1].parent == Span{5, 10});
  CHECK(opts[1].partner == Span{8, 10});

  NodeId phail = find_node(chart, "np|", {0, 5});
  auto left_edge = allowed_parent_spans(chart, phail);
  REQUIRE(left_edge.size() == 1);
  CHECK(left_edge[0].parent == Span{0, 8});
  CHECK(left_edge[0].partner == Span{5, 8});

  NodeId ul = find_node(chart, "np[obj]\\(np|)", {8, 10});
  auto right_edge = allowed_parent_spans(chart, ul);
  REQUIRE(right_edge.size() == 1);
  CHECK(right_edge[0].parent == Span{5, 10});
  CHECK(right_edge[0].partner == Span{5, 8});
}

TEST_CASE("phrasal re-derivation merges support without inflating activation") {
  TwoAnchor t(1.0, 1.0);
  SupportPair full{t.b, t.a};
  SupportPair half{t.b, std::nullopt};

  auto [id, fresh] =
      t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, full, 0.3);
  CHECK(fresh);
  CHECK(t.chart.node(id).activation == doctest::Approx(0.3));

  // Same pair again: no-op, activation untouched even with a higher birth.
  auto again = t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, full, 0.9);
  CHECK(again.first == id);
  CHECK_FALSE(again.second);
  CHECK(t.chart.node(id).activation == doctest::Approx(0.3));

  // A new pair lifts activation to the larger of old and birth.
  auto merged = t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, half, 0.9);
  CHECK(merged.first == id);
  CHECK(merged.second);
  CHECK(t.chart.node(id).activation == doctest::Approx(0.9));
  CHECK(t.chart.node(id).support.size() == 2);

  // ...but never above 1 and never downward.
  SupportPair other{std::nullopt, t.a};
  auto low = t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, other, 0.2);
  CHECK(low.first == id);
  CHECK(t.chart.node(id).activation == doctest::Approx(0.9));
  CHECK(t.chart.node(id).support.size() == 3);

  // Orientation is part of node identity.
  auto flipped =
      t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::RightCancel, full, 0.1);
  CHECK(flipped.first != id);
  CHECK(flipped.second);

  CHECK(t.chart.node(id).ca() == 2);
  CHECK(t.chart.node(id).cr() == 2);
  CHECK(t.chart.node(t.a).cr() == 0);
}

TEST_CASE("activation exchange pins anchors and accumulates on parents") {
  RelaxationParams p;  // rho 0.05, rho' 0.03

  Chart chart;
  chart.vertex_count = 4;
  NodeId a = chart.add_lexical(parse_category("np"), {0, 1}, "A", 0.6, 0.6);
  NodeId b = chart.add_lexical(parse_category("np\\np"), {1, 2}, "B", 0.8, 0.8);
  NodeId c = chart.add_lexical(parse_category("np\\np"), {2, 3}, "C", 0.9, 0.9);
  auto [pid, pf] =
      chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, {b, a}, 0.5);
  auto [qid, qf] =
      chart.add_phrasal(parse_category("np"), {0, 3}, CancelRule::LeftCancel, {c, pid}, 0.4);
  REQUIRE(pf);
  REQUIRE(qf);

  spread_step(chart, p);

  // P gains 0.05*0.6 + 0.05*0.8 bottom-up plus 0.03*0.4/2 top-down from Q;
  // Q gains 0.05*0.5 from P and 0.05*0.9 from C. Senders lose nothing.
  CHECK(chart.node(pid).activation == doctest::Approx(0.576).epsilon(1e-12));
  CHECK(chart.node(qid).activation == doctest::Approx(0.47).epsilon(1e-12));
  // Lexical anchors snap back to their initialization values.
  CHECK(chart.node(a).activation == doctest::Approx(0.6));
  CHECK(chart.node(b).activation == doctest::Approx(0.8));
  CHECK(chart.node(c).activation == doctest::Approx(0.9));

  // Activations clamp at 1.
  TwoAnchor s(1.0, 1.0);
  auto [rid, rf] =
      s.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, {s.b, s.a}, 0.98);
  REQUIRE(rf);
  spread_step(s.chart, p);
  CHECK(s.chart.node(rid).activation == doctest::Approx(1.0));
}

TEST_CASE("decay scales by confirmation and cascades support removal") {
  RelaxationParams p;

  // A fully supported but weak node dies and takes its expectation child along.
  TwoAnchor t(1.0, 1.0);
  auto [pid, pf] =
      t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, {t.b, t.a}, 0.07);
  auto [eid, ef] = t.chart.add_phrasal(parse_category("np"), {0, 3}, CancelRule::LeftCancel,
                                       SupportPair{pid, std::nullopt}, 0.9);
  REQUIRE(pf);
  REQUIRE(ef);
  int removed = decay_step(t.chart, p);
  CHECK(removed == 2);
  CHECK_FALSE(t.chart.alive(pid));  // 0.07 * 0.87 < 0.066
  CHECK_FALSE(t.chart.alive(eid));  // support emptied, despite 0.9*0.87/2 > phi
  CHECK(t.chart.alive(t.a));
  CHECK(t.chart.alive(t.b));
  CHECK(t.chart.all_nodes().size() == 2);

  // Expectation support halves the retention rate.
  TwoAnchor u(1.0, 1.0);
  auto [hid, hf] = u.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel,
                                       SupportPair{u.b, std::nullopt}, 0.5);
  REQUIRE(hf);
  CHECK(u.chart.node(hid).ca() == 1);
  CHECK(decay_step(u.chart, p) == 0);
  CHECK(u.chart.node(hid).activation == doctest::Approx(0.21750).epsilon(1e-9));
}

TEST_CASE("literal decay is much steeper than retention") {
  RelaxationParams p;
  p.decay_mode = DecayMode::Literal;

  TwoAnchor t(1.0, 1.0);
  auto [pid, pf] =
      t.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, {t.b, t.a}, 0.5);
  REQUIRE(pf);
  // 0.5 * (1 - 0.87) = 0.065 < 0.066: gone in one cycle even when confirmed.
  CHECK(decay_step(t.chart, p) == 1);
  CHECK_FALSE(t.chart.alive(pid));

  TwoAnchor u(1.0, 1.0);
  auto [qid, qf] =
      u.chart.add_phrasal(parse_category("np"), {0, 2}, CancelRule::LeftCancel, {u.b, u.a}, 0.6);
  REQUIRE(qf);
  CHECK(decay_step(u.chart, p) == 0);
  CHECK(u.chart.node(qid).activation == doctest::Approx(0.078).epsilon(1e-9));
}

TEST_CASE("generation step pairs sound constituents and projects expectations") {
  RelaxationParams p;
  Chart chart = init_chart(suffixed_np_lattice(), uasc(), np_obj_grammar());
  REQUIRE(chart.all_nodes().size() == 3);
  NodeId tul = find_node(chart, "np|\\(np|)", {5, 8});
  NodeId ul = find_node(chart, "np[obj]\\(np|)", {8, 10});

  // Cycle 1: pha-il+tul combine; tul and ul project leftward expectations.
  int changed = add_nodes_step(chart, p);
  CHECK(changed == 3);
  REQUIRE(chart.all_nodes().size() == 5);

  NodeId inner = find_node(chart, "np|", {0, 8});
  REQUIRE(inner >= 0);
  const ChartNode& in = chart.node(inner);
  REQUIRE(in.support.size() == 2);  // complete pair + tul's expectation
  CHECK(in.support[0].full());
  CHECK(*in.support[0].functor == tul);
  CHECK_FALSE(in.support[1].full());
  CHECK(*in.support[1].functor == tul);
  CHECK(in.ca() == 2);
  CHECK(in.activation == doctest::Approx(1.0));
  CHECK(in.orientation == CancelRule::LeftCancel);

  NodeId expect = find_node(chart, "np[obj]", {5, 10});
  REQUIRE(expect >= 0);
  REQUIRE(chart.node(expect).support.size() == 1);
  CHECK_FALSE(chart.node(expect).support[0].full());
  CHECK(*chart.node(expect).support[0].functor == ul);
  CHECK(chart.node(expect).ca() == 1);

  // Cycle 2: the spanning object NP appears (plus ul's expectation onto it).
  changed = add_nodes_step(chart, p);
  CHECK(changed == 2);
  NodeId root = find_node(chart, "np[obj]", {0, 10});
  REQUIRE(root >= 0);
  REQUIRE(!chart.node(root).support.empty());
  CHECK(chart.node(root).support[0].full());
  CHECK(*chart.node(root).support[0].functor == ul);
  CHECK(*chart.node(root).support[0].argument == inner);

  // Nothing further to build.
  CHECK(add_nodes_step(chart, p) == 0);
}

TEST_CASE("relaxation settles on the object-marked noun phrase") {
  RelaxationParams p;
  Grammar g = np_obj_grammar();
  CatPtr target = parse_category("np[obj]");

  auto run_once = [&](std::ostream* trace) {
    Chart chart = init_chart(suffixed_np_lattice(), uasc(), g);
    ParseForest forest = run_relaxation(chart, g, p, target, trace);
    auto best = best_parse(chart, forest);
    REQUIRE(forest.roots.size() == 1);
    REQUIRE(best.has_value());
    return tree_text(*best);
  };

  std::ostringstream trace;
  std::string text = run_once(&trace);
  CHECK(text ==
        "(np[obj][0,10] (np|[0,8] (np|[0,5] pha-il) (np|\\(np|)[5,8] tul)) "
        "(np[obj]\\(np|)[8,10] ul))");
  CHECK(trace.str().rfind("cycle 1:", 0) == 0);

  // Same input, same story.
  CHECK(run_once(nullptr) == text);

  // Leaves read off the morpheme sequence; the tree is three levels deep.
  Chart chart = init_chart(suffixed_np_lattice(), uasc(), g);
  ParseForest forest = run_relaxation(chart, g, p, target);
  auto best = best_parse(chart, forest);
  REQUIRE(best.has_value());
  CHECK(tree_leaves(*best) == std::vector<std::string>{"pha-il", "tul", "ul"});
  CHECK(tree_size(*best) == 5);
  CHECK(render((*best)->category) == "np[obj]");
  CHECK((*best)->span == Span{0, 10});

  // With no explicit target the grammar's sentence categories drive root
  // selection; np[subj] finds nothing here.
  Chart c2 = init_chart(suffixed_np_lattice(), uasc(), g);
  ParseForest f2 = run_relaxation(c2, g, p);
  CHECK(f2.roots.size() == 1);

  Chart c3_ = init_chart(suffixed_np_lattice(), uasc(), g);
  ParseForest f3 = run_relaxation(c3_, g, p, parse_category("np[subj]"));
  CHECK(f3.roots.empty());
}
