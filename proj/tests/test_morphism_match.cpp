#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tyann/tyann.hpp"

using namespace tyann;

static bool has_code(const Report& r, const std::string& code) {
  for (const auto& v : r)
    if (v.code == code) return true;
  return false;
}

TEST_CASE("element map validation names the broken property") {
  BGraph a, b;
  ElementId an = a.add_node();
  ElementId am = a.add_node();
  ElementId ae = a.add_edge(an, am);
  ElementId bn = b.add_node();
  ElementId bm = b.add_node();
  ElementId be = b.add_edge(bn, bm);

  SUBCASE("identity-like map is valid") {
    ElementMap m{{an, bn}, {am, bm}, {ae, be}};
    CHECK(validate_element_map(a, b, m).empty());
  }
  SUBCASE("missing element") {
    ElementMap m{{an, bn}, {am, bm}};
    CHECK(has_code(validate_element_map(a, b, m), "notTotal"));
  }
  SUBCASE("sort mismatch") {
    ElementMap m{{an, be}, {am, bm}, {ae, be}};
    CHECK(has_code(validate_element_map(a, b, m), "sortMismatch"));
  }
  SUBCASE("endpoints must commute") {
    ElementMap m{{an, bm}, {am, bn}, {ae, be}};
    Report r = validate_element_map(a, b, m);
    CHECK((has_code(r, "sourceNotPreserved") || has_code(r, "targetNotPreserved")));
  }
}

TEST_CASE("containment must be preserved") {
  BGraph a, b;
  ElementId abox = a.add_box();
  ElementId an = a.add_node();
  a.add_to_box(abox, an);
  ElementId bbox = b.add_box();
  ElementId bn = b.add_node();
  ElementMap m{{abox, bbox}, {an, bn}};
  CHECK(has_code(validate_element_map(a, b, m), "containmentNotPreserved"));
  b.add_to_box(bbox, bn);
  CHECK(validate_element_map(a, b, m).empty());
}

TEST_CASE("compose, identity and inverse behave as expected") {
  BGraph g;
  ElementId n = g.add_node();
  ElementId m = g.add_node();
  ElementMap id = identity_map(g);
  CHECK(tyann::apply(id, n) == n);
  ElementMap swap{{n, m}, {m, n}};
  CHECK(compose(swap, swap) == id);
  CHECK(inverse(swap) == swap);
  CHECK(is_injective(swap));
  ElementMap fold{{n, m}, {m, m}};
  CHECK_FALSE(is_injective(fold));
}

TEST_CASE("matcher agrees with the brute-force oracle") {
  std::mt19937 rng(23);
  int nonempty = 0;
  for (int i = 0; i < 400; ++i) {
    BGraph host = oracle::random_bgraph(rng, 7);
    BGraph pattern = oracle::random_bgraph(rng, 4);
    for (bool injective : {false, true}) {
      MatchOptions opt;
      opt.injective = injective;
      auto got = enumerate_matches(pattern, host, opt);
      auto want = oracle::all_morphisms(pattern, host, injective);
      std::set<ElementMap> gs(got.begin(), got.end());
      std::set<ElementMap> ws(want.begin(), want.end());
      CHECK(gs == ws);
      CHECK(got.size() == gs.size());  // no duplicates
      if (!got.empty()) ++nonempty;
    }
  }
  CHECK(nonempty > 50);  // the comparison is not vacuous
}

TEST_CASE("match order is deterministic and lexicographic") {
  BGraph host;
  ElementId a = host.add_node();
  ElementId b = host.add_node();
  BGraph pattern;
  ElementId p = pattern.add_node();
  auto ms = enumerate_matches(pattern, host, {});
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].at(p) == a);
  CHECK(ms[1].at(p) == b);
  CHECK(enumerate_matches(pattern, host, {}) == ms);
}

TEST_CASE("pinned assignments restrict the search") {
  BGraph host;
  ElementId a = host.add_node();
  ElementId b = host.add_node();
  host.add_edge(a, b);
  BGraph pattern;
  ElementId p = pattern.add_node();
  ElementId q = pattern.add_node();
  pattern.add_edge(p, q);
  MatchOptions opt;
  opt.pinned[p] = b;
  CHECK(enumerate_matches(pattern, host, opt).empty());
  opt.pinned[p] = a;
  auto ms = enumerate_matches(pattern, host, opt);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].at(q) == b);
}

TEST_CASE("flag and name compatibility filters annotated matches") {
  AGraph host;
  host.add_node(Flag::Instance, "x");
  ElementId t = host.add_node(Flag::Type, "T");
  AGraph pattern;
  ElementId pt = pattern.add_node(Flag::Type);  // unnamed type: wildcard
  auto ms = enumerate_matches(pattern, host);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].at(pt) == t);
  pattern.names[pt] = "U";
  CHECK(enumerate_matches(pattern, host).empty());
  pattern.names[pt] = "T";
  CHECK(enumerate_matches(pattern, host).size() == 1);
}

TEST_CASE("isomorphism is reflexive and detects renamed copies") {
  std::mt19937 rng(31);
  for (int i = 0; i < 50; ++i) {
    BGraph g = oracle::random_bgraph(rng, 6);
    CHECK(isomorphic(g, g));
    // renumbered copy
    AGraph copy;
    copy.carrier.add_with_id(ElementId{Sort::Node, 100});  // shift fresh ids
    copy.carrier.remove(ElementId{Sort::Node, 100});
    ElementMap m = copy_into(copy, as_annotated(g));
    CHECK(isomorphic(g, copy.carrier));
    if (!g.nodes().empty()) {
      copy.carrier.add_node();
      CHECK_FALSE(isomorphic(g, copy.carrier));
    }
  }
}

TEST_CASE("annotated isomorphism distinguishes flags and names") {
  AGraph a, b;
  a.add_node(Flag::Instance, "x");
  b.add_node(Flag::Instance, "x");
  CHECK(isomorphic(a, b));
  b.names.clear();
  CHECK_FALSE(isomorphic(a, b));
  AGraph c;
  c.add_node(Flag::Type, "x");
  CHECK_FALSE(isomorphic(a, c));
}

TEST_CASE("canonical hash is invariant under renumbering") {
  std::mt19937 rng(37);
  for (int i = 0; i < 50; ++i) {
    BGraph g = oracle::random_bgraph(rng, 6);
    AGraph shifted;
    shifted.carrier.add_with_id(ElementId{Sort::Node, 500});
    shifted.carrier.remove(ElementId{Sort::Node, 500});
    copy_into(shifted, as_annotated(g));
    CHECK(canonical_hash(as_annotated(g)) == canonical_hash(shifted));
  }
}
