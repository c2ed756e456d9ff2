#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tyann/tyann.hpp"

using namespace tyann;

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

static std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

// Parses a fixture and renders it back through the matching document type.
static std::string reserialize(const json& j) {
  std::string kind = j.value("kind", "graph");
  if (kind == "graph") {
    auto d = graph_from_json(j);
    REQUIRE(d.ok());
    return canonical_dump(to_json(*d));
  }
  if (kind == "rule") {
    auto d = rule_from_json(j);
    REQUIRE(d.ok());
    return canonical_dump(to_json(*d));
  }
  if (kind == "constraint") {
    auto d = constraint_from_json(j);
    REQUIRE(d.ok());
    return canonical_dump(to_json(*d));
  }
  if (kind == "typedGraph") {
    auto d = typed_from_json(j);
    REQUIRE(d.ok());
    return canonical_dump(to_json(*d));
  }
  if (kind == "hierarchy") {
    auto d = hierarchy_from_json(j);
    REQUIRE(d.ok());
    return canonical_dump(to_json(*d, j.value("name", "")));
  }
  REQUIRE(false);
  return {};
}

TEST_CASE("save after load is byte identical on every fixture") {
  for (const char* name :
       {"bruce.json", "bruce-post.json", "bundled.json", "credentials.json",
        "doubly-typed.json", "driverIsMale.json", "FromMaleToFemale.json",
        "fromPlanetToDwarf.json", "hierarchy.json", "isDwarfPlanet.json",
        "isPlanet.json", "needsA.json", "needsB.json", "pingpong.json",
        "pluto.json", "pluto-post.json", "seedToA.json", "typed-simple.json"}) {
    CAPTURE(name);
    std::string text = slurp(fixture(name));
    json j = json::parse(text);
    CHECK(reserialize(j) == text);
  }
}

TEST_CASE("malformed graph files are rejected with a diagnostic naming the edge") {
  auto j = read_json_file(fixture("invalid-missing-tgt.json"));
  REQUIRE(j.ok());
  auto d = graph_from_json(*j);
  REQUIRE_FALSE(d.ok());
  bool named = false;
  for (const Violation& v : d.issues)
    if (v.message.find("missing src or tgt") != std::string::npos) named = true;
  CHECK(named);
}

TEST_CASE("schema errors carry usable messages") {
  SUBCASE("duplicate id") {
    json j = json::parse(R"({"nodes":[{"id":"n0"},{"id":"n0"}]})");
    auto d = graph_body_from_json(j);
    REQUIRE_FALSE(d.ok());
    CHECK(d.issues[0].message.find("n0") != std::string::npos);
  }
  SUBCASE("unknown endpoint") {
    json j = json::parse(
        R"({"edges":[{"id":"e0","src":"n0","tgt":"nope"}],"nodes":[{"id":"n0"}]})");
    auto d = graph_body_from_json(j);
    REQUIRE_FALSE(d.ok());
    CHECK(d.issues[0].message.find("e0") != std::string::npos);
  }
  SUBCASE("bad flag") {
    json j = json::parse(R"({"nodes":[{"id":"n0","flag":"with"}]})");
    CHECK_FALSE(graph_body_from_json(j).ok());
  }
  SUBCASE("unknown kind") {
    Workspace ws;
    auto out = ws.load_json(json::parse(R"({"kind":"mystery"})"), "x");
    REQUIRE_FALSE(out.ok());
    CHECK(out.issues[0].message.find("mystery") != std::string::npos);
  }
}

TEST_CASE("in-memory graphs survive a json round trip") {
  std::mt19937 rng(71);
  for (int i = 0; i < 60; ++i) {
    AGraph g = as_annotated(oracle::random_bgraph(rng));
    json j = to_json(as_doc(g, "g"));
    auto back = graph_from_json(j);
    REQUIRE(back.ok());
    CHECK(isomorphic(g, back->graph));
    CHECK(canonical_dump(to_json(*back)) == canonical_dump(j));
  }
}

TEST_CASE("type change rules keep their schema through serialization") {
  TypeChangeRule tcr = make_type_change_rule(Sort::Node, "Old", "New");
  json j = to_json(as_doc(tcr));
  auto back = rule_from_json(j);
  REQUIRE(back.ok());
  REQUIRE(back->type_change.has_value());
  CHECK(back->type_change->from_type == "Old");
  CHECK(back->type_change->to_type == "New");
  CHECK(back->type_change->sort == Sort::Node);
  CHECK(validate_type_change_rule(*back->type_change).empty());
  CHECK(canonical_dump(to_json(*back)) == canonical_dump(j));
}

TEST_CASE("constraints round trip with their morphisms intact") {
  Workspace ws;
  REQUIRE(ws.load_file(fixture("driverIsMale.json")).ok());
  const ConstraintDoc& doc = ws.constraints.at("driverIsMale");
  json j = to_json(doc);
  auto back = constraint_from_json(j);
  REQUIRE(back.ok());
  CHECK(back->set.parts.size() == doc.set.parts.size());
  CHECK(classify_constraint_form(back->set.parts[0]) ==
        classify_constraint_form(doc.set.parts[0]));
  CHECK(canonical_dump(to_json(*back)) == canonical_dump(j));
}

TEST_CASE("typed graphs and hierarchies round trip") {
  std::mt19937 rng(73);
  TypedGraph t = oracle::random_typed(rng);
  json j = to_json(as_doc(t, "t"));
  auto back = typed_from_json(j);
  REQUIRE(back.ok());
  CHECK(validate_typed_graph(back->typed).empty());
  CHECK(canonical_dump(to_json(*back)) == canonical_dump(j));

  TypeHierarchy h;
  h.sorts[Sort::Node].top = "Entity";
  h.sorts[Sort::Node].parent = {{"Student", "Person"}, {"Person", "Entity"}};
  json hj = to_json(h, "h");
  auto hback = hierarchy_from_json(hj);
  REQUIRE(hback.ok());
  CHECK(canonical_dump(to_json(*hback, "h")) == canonical_dump(hj));
  CHECK(hback->sorts.at(Sort::Node).parent.at("Student") == "Person");
}

TEST_CASE("the workspace registers every artifact kind by name") {
  Workspace ws;
  for (const char* name : {"bruce.json", "FromMaleToFemale.json",
                           "driverIsMale.json", "hierarchy.json",
                           "typed-simple.json"})
    REQUIRE(ws.load_file(fixture(name)).ok());
  CHECK(ws.graphs.count("bruce"));
  CHECK(ws.rules.count("FromMaleToFemale"));
  CHECK(ws.constraints.count("driverIsMale"));
  CHECK(ws.hierarchies.count("hierarchy"));
  CHECK(ws.typed.count("typed-simple"));
}
