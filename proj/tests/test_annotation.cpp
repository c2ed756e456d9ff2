#include "doctest.h"
#include "oracles.hpp"
#include "tyann/tyann.hpp"

using namespace tyann;

static bool has_code(const Report& r, const std::string& code) {
  for (const auto& v : r)
    if (v.code == code) return true;
  return false;
}

static TypeHierarchy abc_hierarchy() {
  TypeHierarchy h;
  h.sorts[Sort::Node].top = "Top";
  h.sorts[Sort::Node].parent = {{"A", "B"}, {"B", "C"}, {"C", "Top"}};
  return h;
}

static AGraph abc_graph(ElementId* element = nullptr) {
  AGraph g;
  ElementId x = g.add_node(Flag::Instance, "x");
  g.add_node(Flag::Type, "A");
  g.add_node(Flag::Type, "B");
  g.add_node(Flag::Type, "C");
  g.add_node(Flag::Type, "Top");
  if (element) *element = x;
  return g;
}

TEST_CASE("annotate attaches exactly one fresh pattern") {
  AGraph g;
  ElementId x = g.add_node();
  ElementId t = g.add_node(Flag::Type, "T");
  auto out = annotate(g, x, t);
  REQUIRE(out.ok());
  CHECK(check_well_formed(*out).empty());
  auto anns = annotations_of(*out, x);
  REQUIRE(anns.size() == 1);
  CHECK(anns[0].value == t);
  CHECK(ann_type(*out, x) == ElementSet{t});
}

TEST_CASE("annotate rejects bad inputs with the right code") {
  AGraph g;
  ElementId x = g.add_node();
  ElementId t = g.add_node(Flag::Type, "T");
  ElementId bt = g.add_box(Flag::Type, "BT");
  CHECK(has_code(annotate(g, x, x).issues, "annotationSort"));      // not a type
  CHECK(has_code(annotate(g, t, t).issues, "annotationSort"));      // not instance
  CHECK(has_code(annotate(g, x, bt).issues, "annotationSort"));     // sort clash
  CHECK(has_code(annotate(g, x, ElementId{Sort::Node, 99}).issues, "unknownElement"));
  AGraph g2 = *annotate(g, x, t);
  CHECK(has_code(annotate(g2, x, t).issues, "notTypedTwice"));
}

TEST_CASE("multi-typing with distinct types is allowed") {
  AGraph g;
  ElementId x = g.add_node();
  ElementId t = g.add_node(Flag::Type, "T");
  ElementId u = g.add_node(Flag::Type, "U");
  AGraph g2 = *annotate(*annotate(g, x, t), x, u);
  CHECK(check_well_formed(g2).empty());
  CHECK(ann_type(g2, x) == ElementSet{t, u});
}

TEST_CASE("edges can be type-annotated and checked for endpoint consistency") {
  AGraph g;
  ElementId a = g.add_node();
  ElementId b = g.add_node();
  ElementId c = g.add_node();
  ElementId nt = g.add_node(Flag::Type, "N");
  ElementId mt = g.add_node(Flag::Type, "M");
  ElementId e1 = g.add_edge(a, b);
  ElementId e2 = g.add_edge(a, c);
  ElementId et = g.add_edge(nt, nt, Flag::Type, "E");
  g = *annotate(g, a, nt);
  g = *annotate(g, b, nt);
  g = *annotate(g, c, nt);
  g = *annotate(g, e1, et);
  g = *annotate(g, e2, et);
  CHECK(check_well_formed(g).empty());
  // retyping one target breaks the shared-edge-type consistency
  AGraph bad = *annotate(g, c, mt);
  CHECK(has_code(check_well_formed(bad), "edgeTypeConsistency"));
}

TEST_CASE("well-formedness validator flags structural defects") {
  SUBCASE("annotation node in several patterns") {
    AGraph g;
    ElementId x = g.add_node();
    ElementId y = g.add_node();
    ElementId t = g.add_node(Flag::Type, "T");
    ElementId a = g.add_node(Flag::AnnNode);
    g.add_edge(a, x, Flag::AnnotatesEdge);
    g.add_edge(a, y, Flag::AnnotatesEdge);
    g.add_edge(a, t, Flag::WithEdge);
    CHECK(has_code(check_well_formed(g), "annPatternUnique"));
  }
  SUBCASE("unnamed type") {
    AGraph g;
    g.add_node(Flag::Type);
    CHECK(has_code(check_well_formed(g), "typeUnnamed"));
  }
  SUBCASE("duplicate type names per sort") {
    AGraph g;
    g.add_node(Flag::Type, "T");
    g.add_node(Flag::Type, "T");
    CHECK(has_code(check_well_formed(g), "typeNameClash"));
    AGraph g2;
    g2.add_node(Flag::Type, "T");
    g2.add_box(Flag::Type, "T");  // same name on another sort is fine
    CHECK_FALSE(has_code(check_well_formed(g2), "typeNameClash"));
  }
  SUBCASE("plain edges cannot touch edges") {
    AGraph g;
    ElementId a = g.add_node();
    ElementId b = g.add_node();
    ElementId e = g.add_edge(a, b);
    g.add_edge(a, e, Flag::PlainEdge);
    CHECK(has_code(check_well_formed(g), "edgeEndpoint"));
  }
  SUBCASE("cross-sort annotation") {
    AGraph g;
    ElementId x = g.add_node();
    ElementId bt = g.add_box(Flag::Type, "BT");
    ElementId a = g.add_node(Flag::AnnNode);
    g.add_edge(a, x, Flag::AnnotatesEdge);
    g.add_edge(a, bt, Flag::WithEdge);
    Report r = check_well_formed(g);
    CHECK(has_code(r, "annNodeInstance"));
    CHECK(has_code(r, "annBoxType"));
  }
  SUBCASE("doubly typed element") {
    AGraph g;
    ElementId x = g.add_node();
    ElementId t = g.add_node(Flag::Type, "T");
    for (int i = 0; i < 2; ++i) {
      ElementId a = g.add_node(Flag::AnnNode);
      g.add_edge(a, x, Flag::AnnotatesEdge);
      g.add_edge(a, t, Flag::WithEdge);
    }
    CHECK(has_code(check_well_formed(g), "notTypedTwice"));
  }
}

TEST_CASE("bundle annotation holds the whole chain up to top") {
  TypeHierarchy h = abc_hierarchy();
  CHECK(h.validate().empty());
  ElementId x;
  AGraph g = abc_graph(&x);
  auto out = annotate_with_bundle(g, x, h, "A");
  REQUIRE(out.ok());
  CHECK(check_well_formed(*out, &h).empty());
  ElementSet types = ann_type(*out, x);
  CHECK(types.size() == 4);  // A, B, C, Top

  // upward closure: every supertype of a member is a member
  for (ElementId t : types) {
    auto chain = h.chain(Sort::Node, *out->name(t));
    REQUIRE(chain.ok());
    for (const std::string& super : *chain)
      CHECK(types.count(*out->type_by_name(super, Sort::Node)));
  }
}

TEST_CASE("removing an annotation truncates the chain to the parent") {
  TypeHierarchy h = abc_hierarchy();
  ElementId x;
  AGraph g = abc_graph(&x);
  g = *annotate_with_bundle(g, x, h, "A");

  auto out = remove_annotation_at(g, x, *g.type_by_name("B", Sort::Node), h);
  REQUIRE(out.ok());
  ElementSet types = ann_type(*out, x);
  CHECK(types == ElementSet{*out->type_by_name("C", Sort::Node),
                            *out->type_by_name("Top", Sort::Node)});
  CHECK(check_well_formed(*out, &h).empty());
}

TEST_CASE("the top annotation can never be removed") {
  TypeHierarchy h = abc_hierarchy();
  ElementId x;
  AGraph g = abc_graph(&x);
  g = *annotate_with_bundle(g, x, h, "A");
  auto out = remove_annotation_at(g, x, *g.type_by_name("Top", Sort::Node), h);
  CHECK_FALSE(out.ok());
  CHECK(has_code(out.issues, "topNotRemovable"));
}

TEST_CASE("removing a type outside the bundle is a warning no-op") {
  TypeHierarchy h = abc_hierarchy();
  ElementId x;
  AGraph g = abc_graph(&x);
  g = *annotate_with_bundle(g, x, h, "C");  // bundle {C, Top}
  auto out = remove_annotation_at(g, x, *g.type_by_name("A", Sort::Node), h);
  REQUIRE(out.ok());
  CHECK(has_code(out.issues, "notInChain"));
  CHECK(ann_type(*out, x) == ann_type(g, x));
}

TEST_CASE("plain and bundle annotation regimes cannot mix") {
  TypeHierarchy h = abc_hierarchy();
  ElementId x;
  AGraph g = abc_graph(&x);
  AGraph plain = *annotate(g, x, *g.type_by_name("A", Sort::Node));
  CHECK(has_code(annotate_with_bundle(plain, x, h, "B").issues,
                 "mixedAnnotationRegime"));
  AGraph bundled = *annotate_with_bundle(g, x, h, "B");
  CHECK(has_code(annotate(bundled, x, *g.type_by_name("A", Sort::Node)).issues,
                 "mixedAnnotationRegime"));
}

TEST_CASE("bundle chain contiguity is checked against the hierarchy") {
  TypeHierarchy h = abc_hierarchy();
  ElementId x;
  AGraph g = abc_graph(&x);
  ElementId box = g.add_box(Flag::BundleBox);
  g.carrier.add_to_box(box, *g.type_by_name("A", Sort::Node));
  g.carrier.add_to_box(box, *g.type_by_name("Top", Sort::Node));  // gap: B, C
  ElementId a = g.add_node(Flag::AnnNode);
  g.add_edge(a, x, Flag::AnnotatesEdge);
  g.add_edge(a, box, Flag::WithEdge);
  CHECK(has_code(check_well_formed(g, &h), "bundleChain"));
}
