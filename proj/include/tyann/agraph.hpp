#pragma once

#include "tyann/bgraph.hpp"
#include "tyann/morphism.hpp"

namespace tyann {

// Role of an element inside a type-annotated graph. The carrier sort limits
// which roles an element can take: nodes are instance elements, type
// elements or annotation nodes; edges are plain edges, type elements or
// annotation machinery; boxes are instance elements, type elements or type
// bundles.
enum class Flag : std::uint8_t {
  Instance,
  Type,
  AnnNode,
  BundleBox,
  AnnotatesEdge,
  WithEdge,
  PlainEdge,
};

inline const char* to_string(Flag f) {
  switch (f) {
    case Flag::Instance: return "instance";
    case Flag::Type: return "type";
    case Flag::AnnNode: return "annotation";
    case Flag::BundleBox: return "bundle";
    case Flag::AnnotatesEdge: return "annotates";
    case Flag::WithEdge: return "with";
    case Flag::PlainEdge: return "plain";
  }
  return "?";
}

inline bool flag_fits_sort(Flag f, Sort s) {
  switch (s) {
    case Sort::Node:
      return f == Flag::Instance || f == Flag::Type || f == Flag::AnnNode;
    case Sort::Edge:
      return f == Flag::PlainEdge || f == Flag::Type ||
             f == Flag::AnnotatesEdge || f == Flag::WithEdge;
    case Sort::Box:
      return f == Flag::Instance || f == Flag::Type || f == Flag::BundleBox;
  }
  return false;
}

// Default role for an element that carries no explicit flag.
inline Flag default_flag(Sort s) {
  return s == Sort::Edge ? Flag::PlainEdge : Flag::Instance;
}

// B-graph whose elements carry role flags and optional names. Typing lives
// inside the graph as annotation patterns x <-annotates- a -with-> y.
struct AGraph {
  BGraph carrier;
  std::map<ElementId, Flag> flags;
  std::map<ElementId, std::string> names;

  Flag flag(ElementId x) const {
    auto it = flags.find(x);
    return it == flags.end() ? default_flag(x.sort) : it->second;
  }

  const std::string* name(ElementId x) const {
    auto it = names.find(x);
    return it == names.end() ? nullptr : &it->second;
  }

  ElementId add_node(Flag f = Flag::Instance, std::string name = {}) {
    return finish(carrier.add_node(), f, std::move(name));
  }
  ElementId add_edge(ElementId s, ElementId t, Flag f = Flag::PlainEdge,
                     std::string name = {}) {
    return finish(carrier.add_edge(s, t), f, std::move(name));
  }
  ElementId add_box(Flag f = Flag::Instance, std::string name = {}) {
    return finish(carrier.add_box(), f, std::move(name));
  }

  void remove(ElementId x) {
    carrier.remove(x);
    flags.erase(x);
    names.erase(x);
  }

  // Finds a type element by name, optionally restricted to one sort.
  std::optional<ElementId> type_by_name(const std::string& n,
                                        std::optional<Sort> s = {}) const {
    for (const auto& [id, f] : flags) {
      if (f != Flag::Type) continue;
      if (s && id.sort != *s) continue;
      const std::string* nm = name(id);
      if (nm && *nm == n) return id;
    }
    return std::nullopt;
  }

 private:
  ElementId finish(ElementId id, Flag f, std::string name) {
    flags[id] = f;
    if (!name.empty()) names[id] = std::move(name);
    return id;
  }
};

inline AGraph as_annotated(const BGraph& g) {
  AGraph out;
  out.carrier = g;
  return out;
}

// One occurrence of the annotation pattern x <-annotates- a -with-> y.
struct AnnPattern {
  ElementId ann_node;
  ElementId annotates_edge;
  ElementId with_edge;
  ElementId target;  // x, the annotated element
  ElementId value;   // y, the annotation value
};

// Collects the annotation patterns an annotation node participates in.
// A well-formed node yields exactly one; malformed graphs may yield zero
// or several (validators report those).
inline std::vector<AnnPattern> ann_patterns_of(const AGraph& g, ElementId a) {
  std::vector<ElementId> ann, with;
  for (ElementId e : g.carrier.edges()) {
    if (!g.carrier.has_endpoints(e) || g.carrier.src(e) != a) continue;
    if (g.flag(e) == Flag::AnnotatesEdge) ann.push_back(e);
    if (g.flag(e) == Flag::WithEdge) with.push_back(e);
  }
  std::vector<AnnPattern> out;
  for (ElementId e1 : ann)
    for (ElementId e2 : with)
      out.push_back({a, e1, e2, g.carrier.tgt(e1), g.carrier.tgt(e2)});
  return out;
}

inline std::vector<AnnPattern> all_ann_patterns(const AGraph& g) {
  std::vector<AnnPattern> out;
  for (ElementId n : g.carrier.nodes()) {
    if (g.flag(n) != Flag::AnnNode) continue;
    auto ps = ann_patterns_of(g, n);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

// Annotation patterns attached to one element.
inline std::vector<AnnPattern> annotations_of(const AGraph& g, ElementId x) {
  std::vector<AnnPattern> out;
  for (const AnnPattern& p : all_ann_patterns(g))
    if (p.target == x) out.push_back(p);
  return out;
}

}  // namespace tyann
