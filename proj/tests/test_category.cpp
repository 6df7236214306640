#include "c3/category.hpp"

#include <algorithm>

#include "doctest.h"

using namespace c3;

TEST_CASE("render/parse round trip on the lexicon's category shapes") {
  for (const char* text : {
           "np",
           "np[subj]",
           "s[DEC]",
           "np/np",
           "np\\np",
           "np[obj]\\np",
           "s\\{np[obj],np[subj]}",
           "(s[DEC]\\$X)\\(s\\$X)",
           "np|",
           "np|\\(np|)",
           "np\\(np|)",
           "np[obj]\\(np|)",
           "(s\\{np[obj],np[subj]})|",
           "(s[DEC]\\$X)\\((s\\$X)|)",
           "(a/b)/c",
           "(a/{b,c})/d",
       }) {
    CatPtr c = parse_category(text);
    CHECK(render(c) == text);
    CHECK(equal(parse_category(render(c)), c));
  }
}

TEST_CASE("construction canonicalizes member and feature order") {
  CHECK(render(parse_category("s\\{np[subj],np[obj]}")) == "s\\{np[obj],np[subj]}");
  CHECK(equal(parse_category("s\\{np[subj],np[obj]}"), parse_category("s\\{np[obj],np[subj]}")));
  CHECK(render(parse_category("np[top,obj]")) == "np[obj,top]");
  CHECK(equal(parse_category("np[a,b]"), parse_category("np[b,a]")));
  // Duplicate features collapse; duplicate multiset members do not.
  CHECK(render(parse_category("np[a,a]")) == "np[a]");
  CHECK(render(parse_category("s\\{np,np}")) == "s\\{np,np}");
}

TEST_CASE("parse rejects malformed categories") {
  for (const char* bad : {"", "np/", "(np", "np)", "np[", "np[]", "s\\{}", "s\\{np,}", "|np",
                          "np||", "$X", "np[a b]"}) {
    CHECK_THROWS_AS(parse_category(bad), Error);
  }
}

TEST_CASE("whitespace is tolerated between tokens") {
  CHECK(render(parse_category(" s \\ { np[obj] , np[subj] } ")) == "s\\{np[obj],np[subj]}");
}

TEST_CASE("unify matches structurally and binds variables") {
  CHECK(unify(parse_category("np"), parse_category("np")).has_value());
  CHECK_FALSE(unify(parse_category("np"), parse_category("np[subj]")).has_value());
  CHECK_FALSE(unify(parse_category("np[subj]"), parse_category("np")).has_value());
  CHECK_FALSE(unify(parse_category("np"), parse_category("np|")).has_value());
  CHECK_FALSE(unify(parse_category("np|"), parse_category("np")).has_value());
  CHECK(unify(parse_category("np|"), parse_category("np|")).has_value());

  auto b = unify(parse_category("s\\$X"), parse_category("s\\{np[obj],np[subj]}"));
  REQUIRE(b.has_value());
  REQUIRE(b->count("X") == 1);
  REQUIRE(b->at("X").size() == 2);
  CHECK(render(b->at("X")[0]) == "np[obj]");
  CHECK(render(b->at("X")[1]) == "np[subj]");

  // Multiset matching is order-free on both sides.
  CHECK(unify(parse_category("s\\{np[subj],np[obj]}"), parse_category("s\\{np[obj],np[subj]}"))
            .has_value());
  CHECK_FALSE(
      unify(parse_category("s\\{np[subj],np[obj]}"), parse_category("s\\{np[subj]}")).has_value());

  // A variable on the concrete side never matches.
  CHECK_FALSE(unify(parse_category("s\\$X"), parse_category("s\\$Y")).has_value());

  // The same variable must bind consistently.
  auto twice = unify(parse_category("(s\\$X)/(t\\$X)"),
                     parse_category("(s\\{np})/(t\\{np})"));
  CHECK(twice.has_value());
  auto clash = unify(parse_category("(s\\$X)/(t\\$X)"),
                     parse_category("(s\\{np})/(t\\{np,np})"));
  CHECK_FALSE(clash.has_value());
}

TEST_CASE("normalize substitutes bindings and collapses empty argument sets") {
  Bindings b;
  b["X"] = {parse_category("np[subj]")};
  CHECK(render(normalize(parse_category("s[DEC]\\$X"), b)) == "s[DEC]\\np[subj]");
  b["X"] = {};
  CHECK(render(normalize(parse_category("s[DEC]\\$X"), b)) == "s[DEC]");
  CHECK(has_variables(parse_category("s\\$X")));
  CHECK_FALSE(has_variables(parse_category("s\\{np}")));
}

TEST_CASE("combine performs directional cancellation") {
  auto results = combine(parse_category("np/np"), parse_category("np"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "np");
  CHECK(results[0].rule == CancelRule::RightCancel);

  results = combine(parse_category("np"), parse_category("np[subj]\\np"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "np[subj]");
  CHECK(results[0].rule == CancelRule::LeftCancel);

  // Wrong side: a leftward functor ignores material on its right.
  CHECK(combine(parse_category("np[subj]\\np"), parse_category("np")).empty());
  CHECK(combine(parse_category("np"), parse_category("np/np")).empty());
}

TEST_CASE("combine consumes one slot of an unordered argument set at a time") {
  auto results = combine(parse_category("np[obj]"), parse_category("s\\{np[obj],np[subj]}"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s\\np[subj]");

  results = combine(parse_category("np[subj]"), parse_category("s\\{np[obj],np[subj]}"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s\\np[obj]");

  // Last slot consumed collapses the functor to its result.
  results = combine(parse_category("np[subj]"), parse_category("s\\{np[subj]}"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s");

  // Duplicate slots yield one deduplicated result.
  results = combine(parse_category("np"), parse_category("s\\{np,np}"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s\\np");
}

TEST_CASE("modal ending binds the remaining argument set through $X") {
  auto results =
      combine(parse_category("s\\{np[obj],np[subj]}"), parse_category("(s[DEC]\\$X)\\(s\\$X)"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s[DEC]\\{np[obj],np[subj]}");

  // Suppressed flavor: the activator ending accepts only the suppressed stem.
  results = combine(parse_category("(s\\{np[obj],np[subj]})|"),
                    parse_category("(s[DEC]\\$X)\\((s\\$X)|)"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "s[DEC]\\{np[obj],np[subj]}");
  CHECK(combine(parse_category("s\\{np[obj],np[subj]}"),
                parse_category("(s[DEC]\\$X)\\((s\\$X)|)"))
            .empty());
}

TEST_CASE("suppressed categories block ordinary cancellation") {
  // np/np cannot consume np| ...
  CHECK(combine(parse_category("np/np"), parse_category("np|")).empty());
  // ... np| is no functor ...
  CHECK(combine(parse_category("np"), parse_category("np|")).empty());
  CHECK(combine(parse_category("np|"), parse_category("np")).empty());
  // ... but an activator discharges it.
  auto results = combine(parse_category("np|"), parse_category("np\\(np|)"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "np");
  CHECK(results[0].rule == CancelRule::LeftCancel);

  // Suppressed-result functor keeps the chain suppressed.
  results = combine(parse_category("np|"), parse_category("np|\\(np|)"));
  REQUIRE(results.size() == 1);
  CHECK(render(results[0].category) == "np|");

  // An activator will not take the ordinary category in the suppressed slot.
  CHECK(combine(parse_category("np"), parse_category("np\\(np|)")).empty());
}

TEST_CASE("suppressed factory refuses double suppression") {
  CatPtr np = Category::basic("np");
  CatPtr once = Category::suppressed(np);
  CHECK(render(once) == "np|");
  CHECK_THROWS_AS(Category::suppressed(once), Error);
}

TEST_CASE("classify distinguishes ordinary, suppressed, and activator") {
  CHECK(classify(parse_category("np")) == CatClass::Ordinary);
  CHECK(classify(parse_category("np/np")) == CatClass::Ordinary);
  CHECK(classify(parse_category("np|")) == CatClass::SuppressedKind);
  CHECK(classify(parse_category("(s\\{np[subj]})|")) == CatClass::SuppressedKind);
  CHECK(classify(parse_category("np\\(np|)")) == CatClass::Activator);
  CHECK(classify(parse_category("(s[DEC]\\$X)\\((s\\$X)|)")) == CatClass::Activator);
  // Suppressed result keeps it out of the activator class.
  CHECK(classify(parse_category("np|\\(np|)")) == CatClass::Ordinary);
}

TEST_CASE("distinct slot choices yield ordered distinct results") {
  // Both the variable slot and the concrete slot of the right functor accept
  // s\{np}; the two leftovers differ and come back sorted by rendering.
  auto results = combine(parse_category("s\\{np}"), parse_category("t\\{s\\$X,s\\{np}}"));
  REQUIRE(results.size() == 2);
  CHECK(results[0].rule == CancelRule::LeftCancel);
  CHECK(render(results[0].category) == "t\\(s\\$X)");
  CHECK(render(results[1].category) == "t\\(s\\np)");
}
