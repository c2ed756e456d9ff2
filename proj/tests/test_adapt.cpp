#include "doctest.h"
#include "oracles.hpp"
#include "tyann/tyann.hpp"

using namespace tyann;

static bool has_code(const Report& r, const std::string& code) {
  for (const auto& v : r)
    if (v.code == code) return true;
  return false;
}

static Workspace load_fixtures(std::initializer_list<std::string> names) {
  Workspace ws;
  for (const std::string& n : names)
    REQUIRE(ws.load_file(std::string(FIXTURE_DIR) + "/" + n + ".json").ok());
  return ws;
}

static ElementId find_named(const AGraph& g, const std::string& name) {
  for (const auto& [x, n] : g.names)
    if (n == name) return x;
  REQUIRE(false);
  return {};
}

static ElementMap first_match(const TypeChangeRule& tcr, const AGraph& host) {
  MatchOptions opt;
  opt.injective = true;
  auto ms = enumerate_matches(tcr.rule.L, host, opt);
  REQUIRE_FALSE(ms.empty());
  return ms.front();
}

TEST_CASE("generated type change rules pass their shape validation") {
  for (const TypeChangeRule& t :
       {make_type_change_rule(Sort::Node, "A", "B"),
        make_type_change_rule(Sort::Box, "A", "B"),
        make_edge_type_change_rule("E1", "E2")}) {
    CHECK(validate_type_change_rule(t).empty());
  }
}

TEST_CASE("the shape validation rejects degenerate rules") {
  TypeChangeRule same = make_type_change_rule(Sort::Node, "A", "A");
  CHECK(has_code(validate_type_change_rule(same), "typeChangeShape"));

  // a rule that deletes two annotation patterns is not a type change
  TypeChangeRule two = make_type_change_rule(Sort::Node, "A", "B");
  AGraph& L = two.rule.L;
  ElementId extra = L.add_node(Flag::AnnNode);
  L.add_edge(extra, two.element, Flag::AnnotatesEdge);
  L.add_edge(extra, *L.type_by_name("B", Sort::Node), Flag::WithEdge);
  CHECK(has_code(validate_type_change_rule(two), "typeChangeShape"));
}

TEST_CASE("retyping the driver is detected as losing a required type") {
  Workspace ws = load_fixtures({"bruce", "FromMaleToFemale", "driverIsMale"});
  const AGraph& bruce = ws.graphs.at("bruce").graph;
  const TypeChangeRule& tcr = *ws.rules.at("FromMaleToFemale").type_change;
  std::vector<ConstraintSet> cs{ws.constraints.at("driverIsMale").set};

  auto found = detect_violations(bruce, tcr, first_match(tcr, bruce), cs);
  REQUIRE(found.ok());
  REQUIRE(found->size() == 1);
  const DetectedViolation& d = (*found)[0];
  CHECK(d.constraint_index == 0);
  CHECK(d.form == ConstraintForm::F1);
  CHECK(d.cause == Cause::LostRequiredType);
  // the witness binds the premise person to Bruce
  ElementId bruce_node = find_named(bruce, "Bruce");
  bool bound = false;
  for (const ElementMap& m : d.witness)
    for (const auto& [x, y] : m)
      if (y == bruce_node) bound = true;
  CHECK(bound);
}

TEST_CASE("a type change whose result triggers a premise is premise-now-holds") {
  Workspace ws = load_fixtures({"pingpong", "seedToA", "needsA", "needsB"});
  const AGraph& g = ws.graphs.at("pingpong").graph;
  const TypeChangeRule& tcr = *ws.rules.at("seedToA").type_change;
  std::vector<ConstraintSet> cs{ws.constraints.at("needsA").set,
                                ws.constraints.at("needsB").set};
  auto found = detect_violations(g, tcr, first_match(tcr, g), cs);
  REQUIRE(found.ok());
  REQUIRE(found->size() == 1);
  CHECK((*found)[0].form == ConstraintForm::F2);
  CHECK((*found)[0].cause == Cause::PremiseNowHolds);
  CHECK((*found)[0].constraint_index == 1);  // needsB
}

TEST_CASE("losing the only witness of an existence constraint is classified") {
  // someT: whenever any node exists, some node must be typed T
  Constraint someT;
  someT.name = "someT";
  AGraph prem;
  ElementId px = prem.add_node();
  someT.premise = single_pattern(prem);
  AGraph concl = prem;
  ElementId qy = concl.add_node();
  ElementId qt = concl.add_node(Flag::Type, "T");
  ElementId qa = concl.add_node(Flag::AnnNode);
  concl.add_edge(qa, qy, Flag::AnnotatesEdge);
  concl.add_edge(qa, qt, Flag::WithEdge);
  someT.conclusion = single_pattern(concl);
  someT.morph.graph_map[0] = 0;
  someT.morph.embed[0] = ElementMap{{px, px}};
  REQUIRE(classify_constraint_form(someT) == ConstraintForm::F2);

  AGraph host;
  ElementId u = host.add_node(Flag::Instance, "u");
  ElementId w = host.add_node(Flag::Instance, "w");
  ElementId t = host.add_node(Flag::Type, "T");
  host.add_node(Flag::Type, "U");
  host = *annotate(host, w, t);
  (void)u;

  TypeChangeRule tcr = make_type_change_rule(Sort::Node, "T", "U");
  ConstraintSet cs;
  cs.name = "someT";
  cs.parts = {someT};
  auto found = detect_violations(host, tcr, first_match(tcr, host), {cs});
  REQUIRE(found.ok());
  REQUIRE_FALSE(found->empty());
  for (const DetectedViolation& d : *found)
    CHECK(d.cause == Cause::LostSoleWitness);
}

TEST_CASE("the restricted premise drops the connection to the element") {
  Workspace ws = load_fixtures({"driverIsMale"});
  const Constraint& part = ws.constraints.at("driverIsMale").set.parts[0];
  auto e = distinguished_element(part);
  REQUIRE(e.has_value());
  auto pbar = build_pbar(part, *e);
  REQUIRE(pbar.ok());
  // flat premise: person, the "true" node and the canDrive edge between them
  CHECK(pbar->premise.carrier.size() == 3);
  CHECK(pbar->premise.carrier.edges().size() == 1);
  // restricted premise: the edge is gone, both nodes survive
  CHECK(pbar->graph.carrier.size() == 2);
  CHECK(pbar->graph.carrier.edges().empty());
  CHECK(pbar->graph.carrier.has(pbar->element));
  // ids are shared with the flat premise
  for (ElementId x : pbar->graph.carrier.elements())
    CHECK(pbar->premise.carrier.has(x));
}

TEST_CASE("extend and post policies repair the driver to isomorphic results") {
  Workspace ws = load_fixtures({"bruce", "FromMaleToFemale", "driverIsMale"});
  const AGraph& bruce = ws.graphs.at("bruce").graph;
  const TypeChangeRule& tcr = *ws.rules.at("FromMaleToFemale").type_change;
  std::vector<ConstraintSet> cs{ws.constraints.at("driverIsMale").set};
  ElementMap m = first_match(tcr, bruce);

  auto ext = apply_with_repairs(bruce, tcr, m, cs, RepairPolicy::Extend);
  auto post = apply_with_repairs(bruce, tcr, m, cs, RepairPolicy::Post);
  REQUIRE(ext.ok());
  REQUIRE(post.ok());
  CHECK(ext->converged);
  CHECK(post->converged);
  // the extended rule repairs in a single application, no repair rounds
  CHECK(ext->rounds == 0);
  REQUIRE(ext->trace.size() == 1);
  CHECK(ext->trace[0].strategy == "extendRule");
  CHECK(post->rounds == 1);
  REQUIRE(post->trace.size() == 2);
  CHECK(post->trace[1].strategy == "postRepair");
  CHECK(isomorphic(ext->graph, post->graph));

  // the repaired graph dropped the license edge and kept everything else
  const AGraph& out = post->graph;
  for (const auto& [x, n] : out.names) CHECK(n != "canDrive");
  ElementId bruce_node = find_named(out, "Bruce");
  CHECK(ann_type(out, bruce_node) ==
        ElementSet{*out.type_by_name("Female", Sort::Node)});
  CHECK(out.carrier.has(find_named(out, "true")));
}

TEST_CASE("existence repairs are offered in feasibility order") {
  Workspace ws = load_fixtures({"needsB", "seedToA"});
  const Constraint& part = ws.constraints.at("needsB").set.parts[0];
  const TypeChangeRule& tcr = *ws.rules.at("seedToA").type_change;

  auto lost = handle_form2(tcr, part, Cause::LostSoleWitness);
  REQUIRE(lost.ok());
  REQUIRE(lost->options.size() == 3);
  CHECK(lost->options[0].strategy == RepairStrategy::AddTypeAnnotation);
  CHECK(lost->options[1].strategy == RepairStrategy::CreateTypedElement);
  CHECK(lost->options[2].strategy == RepairStrategy::BlockNAC);
  // the blocking variant guards the original rule with a negative condition
  REQUIRE(lost->options[2].rule.acs.size() == tcr.rule.acs.size() + 1);
  CHECK_FALSE(lost->options[2].rule.acs.back().positive);

  auto triggered = handle_form2(tcr, part, Cause::PremiseNowHolds);
  REQUIRE(triggered.ok());
  for (const RepairOption& o : triggered->options)
    CHECK(o.strategy != RepairStrategy::BlockNAC);
}

TEST_CASE("structure constraints on the new type can fold into the rule") {
  // changing A -> B where every B-typed element needs a marked edge
  Constraint marked;
  marked.name = "bMarked";
  AGraph prem;
  ElementId px = prem.add_node();
  ElementId pt = prem.add_node(Flag::Type, "B");
  ElementId pa = prem.add_node(Flag::AnnNode);
  prem.add_edge(pa, px, Flag::AnnotatesEdge);
  prem.add_edge(pa, pt, Flag::WithEdge);
  marked.premise = single_pattern(prem);
  AGraph concl = prem;
  ElementId qy = concl.add_node(Flag::Instance, "true");
  concl.add_edge(px, qy, Flag::PlainEdge, "marked");
  marked.conclusion = single_pattern(concl);
  marked.morph.graph_map[0] = 0;
  marked.morph.embed[0] = identity_map(prem.carrier);
  REQUIRE(classify_constraint_form(marked) == ConstraintForm::F3);

  TypeChangeRule tcr = make_type_change_rule(Sort::Node, "A", "B");
  auto plan = handle_form3(tcr, marked);
  REQUIRE(plan.ok());
  bool has_post = false, has_extend = false;
  for (const RepairOption& o : plan->options) {
    if (o.strategy == RepairStrategy::PostRepair) has_post = true;
    if (o.strategy == RepairStrategy::ExtendRule) {
      has_extend = true;
      // only R grows; L and the match interface stay untouched
      CHECK(isomorphic(o.rule.L, tcr.rule.L));
      CHECK(o.rule.R.carrier.size() > tcr.rule.R.carrier.size());
      CHECK(validate_rule(o.rule).empty());
    }
  }
  CHECK(has_post);
  CHECK(has_extend);

  // end to end under the extend policy: the fold repairs in round zero
  AGraph host;
  ElementId x = host.add_node(Flag::Instance, "x");
  ElementId ta = host.add_node(Flag::Type, "A");
  host.add_node(Flag::Type, "B");
  host = *annotate(host, x, ta);
  ConstraintSet cs;
  cs.name = "bMarked";
  cs.parts = {marked};
  auto out = apply_with_repairs(host, tcr, first_match(tcr, host), {cs},
                                RepairPolicy::Extend);
  REQUIRE(out.ok());
  CHECK(out->converged);
  CHECK(out->rounds == 0);
  CHECK(check_constraint_set(out->graph, cs).sat);
}

TEST_CASE("mutually triggering constraints exhaust the cascade budget") {
  Workspace ws = load_fixtures({"pingpong", "seedToA", "needsA", "needsB"});
  const AGraph& g = ws.graphs.at("pingpong").graph;
  const TypeChangeRule& tcr = *ws.rules.at("seedToA").type_change;
  std::vector<ConstraintSet> cs{ws.constraints.at("needsA").set,
                                ws.constraints.at("needsB").set};
  auto out = apply_with_repairs(g, tcr, first_match(tcr, g), cs,
                                RepairPolicy::Post, 2);
  REQUIRE(out.ok());
  CHECK_FALSE(out->converged);
  CHECK(out->rounds == 2);
  CHECK_FALSE(out->residual.empty());
  // the trace records the apply step plus one repair per round
  REQUIRE(out->trace.size() == 3);
  CHECK(out->trace.back().round == 2);
  // a bigger budget keeps going, one new typed element per round
  auto more = apply_with_repairs(g, tcr, first_match(tcr, g), cs,
                                 RepairPolicy::Post, 5);
  REQUIRE(more.ok());
  CHECK_FALSE(more->converged);
  CHECK(more->rounds == 5);
  CHECK(more->graph.carrier.size() > out->graph.carrier.size());
}
