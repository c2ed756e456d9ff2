// Regenerates the fixture corpus under fixtures/. Everything except the
// deliberately malformed files is built through the library so the on-disk
// form is canonical (save after load is byte-identical).

#include <fstream>
#include <iostream>

#include "tyann/tyann.hpp"

using namespace tyann;

namespace {

std::string g_dir = "fixtures";

void write(const std::string& name, const json& j) {
  if (!write_json_file(g_dir + "/" + name, j)) {
    std::cerr << "cannot write " << name << "\n";
    std::exit(1);
  }
}

void write_raw(const std::string& name, const std::string& text) {
  std::ofstream out(g_dir + "/" + name);
  out << text;
}

AGraph must(Outcome<AGraph> o) {
  if (!o.ok()) {
    std::cerr << describe(o.issues);
    std::exit(1);
  }
  return std::move(*o);
}

// person with a canDrive edge to "true"
AGraph driver_premise() {
  AGraph p;
  ElementId person = p.add_node();
  ElementId tru = p.add_node(Flag::Instance, "true");
  p.add_edge(person, tru, Flag::PlainEdge, "canDrive");
  return p;
}

ConstraintSet driver_constraint() {
  ConstraintSet cs;
  cs.name = "driverIsMale";
  Constraint c;
  c.name = cs.name;
  AGraph prem = driver_premise();
  c.premise = single_pattern(prem);
  AGraph conc = driver_premise();
  ElementId male = conc.add_node(Flag::Type, "Male");
  conc = must(annotate(conc, ElementId{Sort::Node, 0}, male));
  c.conclusion = single_pattern(conc);
  c.morph.graph_map[0] = 0;
  for (ElementId x : prem.carrier.elements()) c.morph.embed[0][x] = x;
  cs.parts.push_back(std::move(c));
  return cs;
}

void driver_fixtures() {
  AGraph g;
  ElementId bruce = g.add_node(Flag::Instance, "Bruce");
  ElementId tru = g.add_node(Flag::Instance, "true");
  ElementId male = g.add_node(Flag::Type, "Male");
  g.add_node(Flag::Type, "Female");
  g.add_edge(bruce, tru, Flag::PlainEdge, "canDrive");
  g = must(annotate(g, bruce, male));
  write("bruce.json", to_json(as_doc(g, "bruce")));

  TypeChangeRule rule = make_type_change_rule(Sort::Node, "Male", "Female");
  rule.rule.name = "FromMaleToFemale";
  write("FromMaleToFemale.json", to_json(as_doc(rule)));

  write("driverIsMale.json", to_json(as_doc(driver_constraint())));

  // post-change reference graph, produced by the post policy pipeline
  MatchOptions mo;
  mo.injective = true;
  mo.compatible = flag_name_compat(rule.rule.L, g);
  auto matches = enumerate_matches(rule.rule.L.carrier, g.carrier, mo);
  auto adapted = apply_with_repairs(g, rule, matches.front(), {driver_constraint()},
                                    RepairPolicy::Post);
  if (!adapted.ok() || !adapted->converged) {
    std::cerr << "driver scenario did not converge\n";
    std::exit(1);
  }
  write("bruce-post.json", to_json(as_doc(adapted->graph, "bruce-post")));
}

// planet candidate with its three property edges
AGraph planet_premise(bool cleared) {
  AGraph p;
  ElementId body = p.add_node();
  ElementId tru = p.add_node(Flag::Instance, "true");
  p.add_edge(body, tru, Flag::PlainEdge, "orbitsSun");
  p.add_edge(body, tru, Flag::PlainEdge, "hydrostatic");
  if (cleared) {
    p.add_edge(body, tru, Flag::PlainEdge, "cleared");
  } else {
    ElementId fls = p.add_node(Flag::Instance, "false");
    p.add_edge(body, fls, Flag::PlainEdge, "cleared");
  }
  return p;
}

ConstraintSet is_planet_constraint() {
  ConstraintSet cs;
  cs.name = "isPlanet";

  // a body with all three properties carries the Planet type
  Constraint c0;
  c0.name = cs.name;
  AGraph prem0 = planet_premise(true);
  c0.premise = single_pattern(prem0);
  AGraph conc0 = planet_premise(true);
  ElementId planet = conc0.add_node(Flag::Type, "Planet");
  conc0 = must(annotate(conc0, ElementId{Sort::Node, 0}, planet));
  c0.conclusion = single_pattern(conc0);
  c0.morph.graph_map[0] = 0;
  for (ElementId x : prem0.carrier.elements()) c0.morph.embed[0][x] = x;
  cs.parts.push_back(std::move(c0));

  // conversely, a Planet-typed body must have cleared its orbit
  Constraint c1;
  c1.name = cs.name + "#1";
  AGraph prem1;
  ElementId body = prem1.add_node();
  ElementId planet1 = prem1.add_node(Flag::Type, "Planet");
  prem1 = must(annotate(prem1, body, planet1));
  c1.premise = single_pattern(prem1);
  AGraph conc1 = prem1;
  ElementId tru = conc1.add_node(Flag::Instance, "true");
  conc1.add_edge(body, tru, Flag::PlainEdge, "cleared");
  c1.conclusion = single_pattern(conc1);
  c1.morph.graph_map[0] = 0;
  for (ElementId x : prem1.carrier.elements()) c1.morph.embed[0][x] = x;
  cs.parts.push_back(std::move(c1));
  return cs;
}

ConstraintSet is_dwarf_constraint() {
  ConstraintSet cs;
  cs.name = "isDwarfPlanet";
  Constraint c;
  c.name = cs.name;
  AGraph prem = planet_premise(false);
  c.premise = single_pattern(prem);
  AGraph conc = planet_premise(false);
  ElementId dwarf = conc.add_node(Flag::Type, "DwarfPlanet");
  conc = must(annotate(conc, ElementId{Sort::Node, 0}, dwarf));
  c.conclusion = single_pattern(conc);
  c.morph.graph_map[0] = 0;
  for (ElementId x : prem.carrier.elements()) c.morph.embed[0][x] = x;
  cs.parts.push_back(std::move(c));
  return cs;
}

void planet_fixtures() {
  AGraph g;
  ElementId pluto = g.add_node(Flag::Instance, "Pluto");
  ElementId tru = g.add_node(Flag::Instance, "true");
  ElementId fls = g.add_node(Flag::Instance, "false");
  ElementId planet = g.add_node(Flag::Type, "Planet");
  g.add_node(Flag::Type, "DwarfPlanet");
  g.add_edge(pluto, tru, Flag::PlainEdge, "orbitsSun");
  g.add_edge(pluto, tru, Flag::PlainEdge, "hydrostatic");
  g.add_edge(pluto, fls, Flag::PlainEdge, "cleared");
  g = must(annotate(g, pluto, planet));
  write("pluto.json", to_json(as_doc(g, "pluto")));

  TypeChangeRule rule = make_type_change_rule(Sort::Node, "Planet", "DwarfPlanet");
  rule.rule.name = "fromPlanetToDwarf";
  write("fromPlanetToDwarf.json", to_json(as_doc(rule)));
  write("isPlanet.json", to_json(as_doc(is_planet_constraint())));
  write("isDwarfPlanet.json", to_json(as_doc(is_dwarf_constraint())));

  MatchOptions mo;
  mo.injective = true;
  mo.compatible = flag_name_compat(rule.rule.L, g);
  auto matches = enumerate_matches(rule.rule.L.carrier, g.carrier, mo);
  auto adapted = apply_with_repairs(
      g, rule, matches.front(), {is_planet_constraint(), is_dwarf_constraint()},
      RepairPolicy::Post);
  if (!adapted.ok() || !adapted->converged) {
    std::cerr << "planet scenario did not converge\n";
    std::exit(1);
  }
  write("pluto-post.json", to_json(as_doc(adapted->graph, "pluto-post")));
}

// instance-level multi-typing: one element annotated with two roles
void credentials_fixtures() {
  AGraph g;
  ElementId alice = g.add_node(Flag::Instance, "alice");
  ElementId employee = g.add_node(Flag::Type, "Employee");
  ElementId admin = g.add_node(Flag::Type, "Admin");
  g = must(annotate(g, alice, employee));
  g = must(annotate(g, alice, admin));
  write("credentials.json", to_json(as_doc(g, "credentials")));
}

void hierarchy_fixtures() {
  TypeHierarchy h;
  h.sorts[Sort::Node].top = "Entity";
  h.sorts[Sort::Node].parent = {{"Student", "Person"}, {"Person", "Entity"}};
  write("hierarchy.json", to_json(h, "hierarchy"));

  AGraph g;
  ElementId s = g.add_node(Flag::Instance, "s");
  g.add_node(Flag::Type, "Student");
  g.add_node(Flag::Type, "Person");
  g.add_node(Flag::Type, "Entity");
  g = must(annotate_with_bundle(g, s, h, "Student"));
  write("bundled.json", to_json(as_doc(g, "bundled")));
}

// two mutually triggering constraints: every A needs an outgoing edge to a
// fresh B and vice versa, so repair by element creation never terminates
ConstraintSet needs_constraint(const std::string& from, const std::string& to) {
  ConstraintSet cs;
  cs.name = "needs" + to;
  Constraint c;
  c.name = cs.name;
  AGraph prem;
  ElementId x = prem.add_node();
  ElementId tf = prem.add_node(Flag::Type, from);
  prem.add_node(Flag::Type, to);
  prem = must(annotate(prem, x, tf));
  c.premise = single_pattern(prem);
  AGraph conc = prem;
  ElementId y = conc.add_node();
  conc.add_edge(x, y, Flag::PlainEdge, "needs");
  conc = must(annotate(conc, y, *conc.type_by_name(to, Sort::Node)));
  c.conclusion = single_pattern(conc);
  c.morph.graph_map[0] = 0;
  for (ElementId e : prem.carrier.elements()) c.morph.embed[0][e] = e;
  cs.parts.push_back(std::move(c));
  return cs;
}

void pingpong_fixtures() {
  AGraph g;
  ElementId n0 = g.add_node(Flag::Instance, "n0");
  ElementId seed = g.add_node(Flag::Type, "Seed");
  g.add_node(Flag::Type, "A");
  g.add_node(Flag::Type, "B");
  g = must(annotate(g, n0, seed));
  write("pingpong.json", to_json(as_doc(g, "pingpong")));

  TypeChangeRule rule = make_type_change_rule(Sort::Node, "Seed", "A");
  rule.rule.name = "seedToA";
  write("seedToA.json", to_json(as_doc(rule)));
  write("needsB.json", to_json(as_doc(needs_constraint("A", "B"))));
  write("needsA.json", to_json(as_doc(needs_constraint("B", "A"))));
}

void typed_fixtures() {
  AGraph tg;
  ElementId person = tg.add_node(Flag::Type, "Person");
  ElementId knows_t = tg.add_edge(person, person, Flag::Type, "knows");
  BGraph inst;
  ElementId alice = inst.add_node();
  ElementId bob = inst.add_node();
  ElementId knows = inst.add_edge(alice, bob);
  TypedGraph t;
  t.instance = inst;
  t.type_graph = tg;
  t.tp = {{alice, person}, {bob, person}, {knows, knows_t}};
  write("typed-simple.json", to_json(as_doc(t, "typed-simple")));
}

void malformed_fixtures() {
  write_raw("invalid-missing-tgt.json", R"({
  "edges": [
    {
      "flag": "plain",
      "id": "e0",
      "src": "a"
    }
  ],
  "kind": "graph",
  "name": "invalid-missing-tgt",
  "nodes": [
    {
      "flag": "instance",
      "id": "a"
    }
  ]
}
)");

  // element typed twice with the same type (refused by the construction
  // API, so the carrier is assembled by hand)
  AGraph g;
  ElementId x = g.add_node(Flag::Instance, "x");
  ElementId t = g.add_node(Flag::Type, "T");
  for (int i = 0; i < 2; ++i) {
    ElementId a = g.add_node(Flag::AnnNode);
    g.add_edge(a, x, Flag::AnnotatesEdge);
    g.add_edge(a, t, Flag::WithEdge);
  }
  write("doubly-typed.json", to_json(as_doc(g, "doubly-typed")));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_dir = argv[1];
  driver_fixtures();
  planet_fixtures();
  credentials_fixtures();
  hierarchy_fixtures();
  pingpong_fixtures();
  typed_fixtures();
  malformed_fixtures();
  std::cout << "fixtures written to " << g_dir << "\n";
  return 0;
}
