#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tyann/tyann.hpp"

using namespace tyann;

TEST_CASE("fresh ids are monotone and never reused") {
  BGraph g;
  ElementId a = g.add_node();
  ElementId b = g.add_node();
  CHECK(a.value < b.value);
  g.remove(b);
  ElementId c = g.add_node();
  CHECK(c.value > b.value);
  g.add_with_id(ElementId{Sort::Node, 40});
  CHECK(g.add_node().value > 40);
}

TEST_CASE("element sets are partitioned by sort") {
  BGraph g;
  ElementId n = g.add_node();
  ElementId b = g.add_box();
  ElementId e = g.add_edge(n, b);
  CHECK(g.has(n));
  CHECK(g.has(e));
  CHECK(g.has(b));
  CHECK(g.elements().size() == 3);
  CHECK(g.src(e) == n);
  CHECK(g.tgt(e) == b);
  g.remove(e);
  CHECK_FALSE(g.has(e));
  CHECK(g.size() == 2);
}

TEST_CASE("containment closes transitively and matches the naive closure") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    BGraph g = oracle::random_bgraph(rng);
    auto closed = oracle::closed_containment(g);
    for (ElementId b : g.boxes()) CHECK(g.content(b) == closed[b]);
  }
}

TEST_CASE("removing an element scrubs it from all boxes") {
  BGraph g;
  ElementId outer = g.add_box();
  ElementId inner = g.add_box();
  ElementId n = g.add_node();
  g.add_to_box(inner, n);
  g.add_to_box(outer, inner);
  CHECK(g.contains(outer, n));  // via closure
  g.remove(n);
  CHECK_FALSE(g.contains(outer, n));
  CHECK_FALSE(g.contains(inner, n));
}

static bool has_code(const Report& r, const std::string& code) {
  for (const auto& v : r)
    if (v.code == code) return true;
  return false;
}

TEST_CASE("validator reports each representation defect") {
  SUBCASE("dangling endpoints") {
    BGraph g;
    ElementId a = g.add_node();
    ElementId b = g.add_node();
    ElementId e = g.add_edge(a, b);
    g.remove(b);
    // remove() keeps the edge but its target is gone
    CHECK(has_code(validate_bgraph(g), "danglingTarget"));
    g.remove(a);
    CHECK(has_code(validate_bgraph(g), "danglingSource"));
    (void)e;
  }
  SUBCASE("edge content") {
    BGraph g;
    ElementId b = g.add_box();
    ElementId n = g.add_node();
    ElementId e = g.add_edge(n, n);
    g.add_to_box(b, e);
    CHECK(has_code(validate_bgraph(g), "edgeInBox"));
  }
  SUBCASE("unclosed containment") {
    BGraph g;
    ElementId outer = g.add_box();
    ElementId inner = g.add_box();
    ElementId n = g.add_node();
    g.add_to_box_raw(inner, n);
    g.add_to_box_raw(outer, inner);
    CHECK(has_code(validate_bgraph(g), "containmentNotTransitive"));
    g.close_containment();
    CHECK(validate_bgraph(g).empty());
  }
  SUBCASE("self containment") {
    BGraph g;
    ElementId b = g.add_box();
    g.add_to_box_raw(b, b);
    CHECK(has_code(validate_bgraph(g), "selfContainment"));
  }
}

TEST_CASE("random graphs built through the mutators validate cleanly") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    BGraph g = oracle::random_bgraph(rng);
    CHECK(validate_bgraph(g).empty());
  }
}
