#pragma once

#include "tyann/agraph.hpp"

namespace tyann {

// Copies every element of src into dst with fresh ids, preserving structure,
// flags and names. Returns the embedding src -> dst.
inline ElementMap copy_into(AGraph& dst, const AGraph& src) {
  ElementMap map;
  for (ElementId n : src.carrier.nodes()) map[n] = dst.carrier.add_node();
  for (ElementId b : src.carrier.boxes()) map[b] = dst.carrier.add_box();
  for (ElementId e : src.carrier.edges()) map[e] = dst.carrier.add_edge(e, e);
  for (ElementId e : src.carrier.edges())
    dst.carrier.set_endpoints(map[e], map.at(src.carrier.src(e)),
                              map.at(src.carrier.tgt(e)));
  for (ElementId b : src.carrier.boxes())
    for (ElementId x : src.carrier.content(b))
      dst.carrier.add_to_box_raw(map[b], map.at(x));
  dst.carrier.close_containment();
  for (const auto& [x, y] : map) {
    dst.flags[y] = src.flag(x);
    if (const std::string* n = src.name(x)) dst.names[y] = *n;
  }
  return map;
}

struct Coproduct {
  AGraph graph;
  ElementMap in1, in2;
};

// Disjoint union with its two injections.
inline Coproduct coproduct(const AGraph& g1, const AGraph& g2) {
  Coproduct out;
  out.in1 = copy_into(out.graph, g1);
  out.in2 = copy_into(out.graph, g2);
  return out;
}

inline Coproduct coproduct(const BGraph& g1, const BGraph& g2) {
  return coproduct(as_annotated(g1), as_annotated(g2));
}

// Glues g2 onto g1 along `identify` (an injective partial map from g2
// elements to g1 elements): the pushout of g1 and g2 over the shared part.
// Identified elements keep g1's flag and name.
inline Coproduct glue(const AGraph& g1, const AGraph& g2,
                      const ElementMap& identify) {
  Coproduct out;
  out.in1 = copy_into(out.graph, g1);
  ElementMap& m2 = out.in2;
  for (ElementId n : g2.carrier.nodes())
    m2[n] = identify.count(n) ? out.in1.at(identify.at(n))
                              : out.graph.carrier.add_node();
  for (ElementId b : g2.carrier.boxes())
    m2[b] = identify.count(b) ? out.in1.at(identify.at(b))
                              : out.graph.carrier.add_box();
  for (ElementId e : g2.carrier.edges())
    m2[e] = identify.count(e) ? out.in1.at(identify.at(e))
                              : out.graph.carrier.add_edge(e, e);
  for (ElementId e : g2.carrier.edges()) {
    if (identify.count(e)) continue;
    out.graph.carrier.set_endpoints(m2[e], m2.at(g2.carrier.src(e)),
                                    m2.at(g2.carrier.tgt(e)));
  }
  for (ElementId b : g2.carrier.boxes())
    for (ElementId x : g2.carrier.content(b))
      out.graph.carrier.add_to_box_raw(m2.at(b), m2.at(x));
  out.graph.carrier.close_containment();
  for (const auto& [x, y] : m2) {
    if (identify.count(x)) continue;
    out.graph.flags[y] = g2.flag(x);
    if (const std::string* n = g2.name(x)) out.graph.names[y] = *n;
  }
  return out;
}

// Restriction of g to `keep`, preserving element ids. Edges with a dropped
// endpoint and containment pairs with a dropped side are dropped as well.
inline AGraph subgraph(const AGraph& g, const ElementSet& keep) {
  AGraph out;
  for (ElementId x : g.carrier.elements()) {
    if (!keep.count(x)) continue;
    if (x.sort == Sort::Edge) {
      if (!keep.count(g.carrier.src(x)) || !keep.count(g.carrier.tgt(x)))
        continue;
      out.carrier.add_with_id(x);
      out.carrier.set_endpoints(x, g.carrier.src(x), g.carrier.tgt(x));
    } else {
      out.carrier.add_with_id(x);
    }
  }
  for (ElementId b : g.carrier.boxes()) {
    if (!out.carrier.has(b)) continue;
    for (ElementId x : g.carrier.content(b))
      if (out.carrier.has(x)) out.carrier.add_to_box_raw(b, x);
  }
  out.carrier.close_containment();
  for (ElementId x : out.carrier.elements()) {
    out.flags[x] = g.flag(x);
    if (const std::string* n = g.name(x)) out.names[x] = *n;
  }
  return out;
}

}  // namespace tyann
