#pragma once

#include "tyann/match.hpp"

namespace tyann {

// Single-inheritance hierarchy per sort, with a distinguished top type.
// Types are referenced by name and resolved against a graph's type elements
// when the hierarchy is used.
struct TypeHierarchy {
  struct PerSort {
    std::string top;
    std::map<std::string, std::string> parent;  // type -> supertype
  };
  std::map<Sort, PerSort> sorts;

  // Chain leaf <= ... <= top, leaf first.
  Outcome<std::vector<std::string>> chain(Sort sort, const std::string& leaf) const {
    auto it = sorts.find(sort);
    if (it == sorts.end())
      return Outcome<std::vector<std::string>>::failure(
          "unknownSort", "hierarchy has no partition for this sort");
    const PerSort& h = it->second;
    std::vector<std::string> out;
    std::string cur = leaf;
    std::set<std::string> seen;
    while (true) {
      if (!seen.insert(cur).second)
        return Outcome<std::vector<std::string>>::failure(
            "hierarchyCycle", "inheritance chain contains a cycle at " + cur);
      out.push_back(cur);
      if (cur == h.top) return Outcome<std::vector<std::string>>::success(out);
      auto p = h.parent.find(cur);
      if (p == h.parent.end())
        return Outcome<std::vector<std::string>>::failure(
            "unknownType", "type " + cur + " does not reach the top type");
      cur = p->second;
    }
  }

  Report validate() const {
    Report report;
    for (const auto& [sort, h] : sorts) {
      if (h.top.empty())
        report.push_back({"noTop", "hierarchy partition has no top type", {}});
      for (const auto& [t, _] : h.parent)
        if (!chain(sort, t).ok())
          report.push_back({"brokenChain", "type " + t + " has no chain to top", {}});
    }
    return report;
  }
};

// Set of types annotating an element: with-targets of its annotation nodes
// that are type elements, plus the contents of its type bundles.
inline ElementSet ann_type(const AGraph& g, ElementId x) {
  ElementSet out;
  for (const AnnPattern& p : annotations_of(g, x)) {
    if (g.flag(p.value) == Flag::Type) out.insert(p.value);
    if (g.flag(p.value) == Flag::BundleBox)
      for (ElementId t : g.carrier.content(p.value))
        if (g.flag(t) == Flag::Type) out.insert(t);
  }
  return out;
}

inline bool is_instance_like(const AGraph& g, ElementId x) {
  Flag f = g.flag(x);
  return f == Flag::Instance || f == Flag::PlainEdge;
}

namespace detail {
inline bool is_annotation_machinery(Flag f) {
  return f == Flag::AnnNode || f == Flag::AnnotatesEdge || f == Flag::WithEdge;
}
}  // namespace detail

// Attaches one fresh annotation pattern x <- a -> type to the element.
inline Outcome<AGraph> annotate(const AGraph& g, ElementId element, ElementId type) {
  if (!g.carrier.has(element) || !g.carrier.has(type))
    return Outcome<AGraph>::failure("unknownElement", "element or type not in graph",
                                    {element, type});
  if (!is_instance_like(g, element))
    return Outcome<AGraph>::failure("annotationSort",
                                    "only instance elements can be type-annotated",
                                    {element});
  if (g.flag(type) != Flag::Type)
    return Outcome<AGraph>::failure("annotationSort", "annotation value is not a type",
                                    {type});
  if (type.sort != element.sort)
    return Outcome<AGraph>::failure("annotationSort",
                                    "annotation sort violation: type sort differs "
                                    "from element sort",
                                    {element, type});
  for (const AnnPattern& p : annotations_of(g, element))
    if (g.flag(p.value) == Flag::BundleBox)
      return Outcome<AGraph>::failure("mixedAnnotationRegime",
                                      "element already carries a bundle annotation",
                                      {element});
  if (ann_type(g, element).count(type))
    return Outcome<AGraph>::failure("notTypedTwice",
                                    "element is already annotated with this type",
                                    {element, type});
  AGraph out = g;
  ElementId a = out.add_node(Flag::AnnNode);
  out.add_edge(a, element, Flag::AnnotatesEdge);
  out.add_edge(a, type, Flag::WithEdge);
  return Outcome<AGraph>::success(std::move(out));
}

// Annotates the element with a fresh type bundle containing the inheritance
// chain leaf <= ... <= top.
inline Outcome<AGraph> annotate_with_bundle(const AGraph& g, ElementId element,
                                            const TypeHierarchy& hier,
                                            const std::string& leaf) {
  if (!g.carrier.has(element))
    return Outcome<AGraph>::failure("unknownElement", "element not in graph", {element});
  if (!is_instance_like(g, element))
    return Outcome<AGraph>::failure("annotationSort",
                                    "only instance elements can be type-annotated",
                                    {element});
  auto chain = hier.chain(element.sort, leaf);
  if (!chain.ok()) return {std::nullopt, chain.issues};
  for (const AnnPattern& p : annotations_of(g, element))
    if (g.flag(p.value) == Flag::Type)
      return Outcome<AGraph>::failure("mixedAnnotationRegime",
                                      "element already carries plain type annotations",
                                      {element});
  AGraph out = g;
  ElementId box = out.add_box(Flag::BundleBox);
  for (const std::string& tname : *chain) {
    auto t = out.type_by_name(tname, element.sort);
    if (!t)
      return Outcome<AGraph>::failure("unknownType",
                                      "type " + tname + " has no element in the graph");
    out.carrier.add_to_box(box, *t);
  }
  ElementId a = out.add_node(Flag::AnnNode);
  out.add_edge(a, element, Flag::AnnotatesEdge);
  out.add_edge(a, box, Flag::WithEdge);
  return Outcome<AGraph>::success(std::move(out));
}

// Removes the annotation with `type` from a bundle-annotated element: the
// bundle is replaced by one holding the chain from the parent of `type`
// upward. Removing the top type is refused.
inline Outcome<AGraph> remove_annotation_at(const AGraph& g, ElementId element,
                                            ElementId type,
                                            const TypeHierarchy& hier) {
  const std::string* tname = g.name(type);
  if (!tname)
    return Outcome<AGraph>::failure("unknownType", "type element has no name", {type});
  auto hs = hier.sorts.find(type.sort);
  if (hs == hier.sorts.end())
    return Outcome<AGraph>::failure("unknownSort", "no hierarchy partition for sort");
  if (*tname == hs->second.top)
    return Outcome<AGraph>::failure(
        "topNotRemovable", "the top-type annotation can never be removed", {type});

  for (const AnnPattern& p : annotations_of(g, element)) {
    if (g.flag(p.value) != Flag::BundleBox) continue;
    if (!g.carrier.contains(p.value, type)) continue;
    AGraph out = g;
    out.remove(p.annotates_edge);
    out.remove(p.with_edge);
    out.remove(p.ann_node);
    out.remove(p.value);
    auto parent = hs->second.parent.find(*tname);
    if (parent == hs->second.parent.end())
      return Outcome<AGraph>::failure("unknownType",
                                      "type " + *tname + " has no parent chain");
    return annotate_with_bundle(out, element, hier, parent->second);
  }
  Outcome<AGraph> out = Outcome<AGraph>::success(g);
  out.issues.push_back({"notInChain",
                        "warning: element carries no bundle with this type; no-op",
                        {element, type}});
  return out;
}

// Well-formedness of a type-annotated graph. Assumes the carrier itself is
// valid; pass a hierarchy to also check bundle-chain contiguity.
inline Report check_well_formed(const AGraph& g, const TypeHierarchy* hier = nullptr) {
  Report report;
  const BGraph& c = g.carrier;

  for (ElementId x : c.elements()) {
    if (!flag_fits_sort(g.flag(x), x.sort))
      report.push_back({"flagSort", "role flag does not fit the element sort", {x}});
    if (g.flag(x) == Flag::Type && !g.name(x))
      report.push_back({"typeUnnamed", "type element has no name", {x}});
  }

  // type names unique per sort
  std::map<std::pair<int, std::string>, ElementId> type_names;
  for (const auto& [x, f] : g.flags) {
    if (f != Flag::Type) continue;
    if (const std::string* n = g.name(x)) {
      auto key = std::make_pair(static_cast<int>(x.sort), *n);
      auto [it, fresh] = type_names.emplace(key, x);
      if (!fresh)
        report.push_back({"typeNameClash", "two type elements share name " + *n,
                          {it->second, x}});
    }
  }

  // annotation machinery structure
  for (ElementId e : c.edges()) {
    Flag f = g.flag(e);
    if (!c.has_endpoints(e)) continue;
    ElementId s = c.src(e), t = c.tgt(e);
    if (f == Flag::AnnotatesEdge || f == Flag::WithEdge) {
      if (g.flag(s) != Flag::AnnNode)
        report.push_back({"annPatternUnique",
                          "annotation edge does not start at an annotation node", {e}});
      if (detail::is_annotation_machinery(g.flag(t)))
        report.push_back({"annMachineryAnnotated",
                          "annotation machinery must not be annotated", {e, t}});
    } else {
      if (s.sort == Sort::Edge || t.sort == Sort::Edge)
        report.push_back({"edgeEndpoint",
                          "only annotates edges may have edge endpoints", {e}});
    }
  }

  for (ElementId n : c.nodes()) {
    if (g.flag(n) != Flag::AnnNode) continue;
    std::size_t ann = 0, with = 0;
    for (ElementId e : c.edges()) {
      if (!c.has_endpoints(e) || c.src(e) != n) continue;
      if (g.flag(e) == Flag::AnnotatesEdge) ++ann;
      if (g.flag(e) == Flag::WithEdge) ++with;
    }
    if (ann != 1 || with != 1)
      report.push_back({"annPatternUnique",
                        "annotation node must participate in exactly one "
                        "annotation pattern",
                        {n}});
  }

  auto instance_flag_for = [](Sort s) {
    return s == Sort::Edge ? Flag::PlainEdge : Flag::Instance;
  };

  std::map<ElementId, std::vector<AnnPattern>> per_target;
  for (const AnnPattern& p : all_ann_patterns(g)) per_target[p.target].push_back(p);

  static const char* kInstanceCode[3] = {"annNodeInstance", "annEdgeInstance",
                                         "annBoxInstance"};
  static const char* kTypeCode[3] = {"annNodeType", "annEdgeType", "annBoxType"};

  for (const auto& [target, patterns] : per_target) {
    bool has_plain_type = false, has_bundle = false;
    std::map<ElementId, int> type_uses;
    for (const AnnPattern& p : patterns) {
      Flag vf = g.flag(p.value);
      if (vf == Flag::Type) {
        has_plain_type = true;
        ++type_uses[p.value];
        // target-centric: an instance may only be annotated with types of
        // its own sort
        if (g.flag(target) == instance_flag_for(target.sort) &&
            p.value.sort != target.sort)
          report.push_back({kInstanceCode[static_cast<int>(target.sort)],
                            "element annotated with a type of a different sort",
                            {target, p.value}});
        // value-centric: a type may only annotate instances of its sort
        if (target.sort != p.value.sort ||
            g.flag(target) != instance_flag_for(p.value.sort))
          report.push_back({kTypeCode[static_cast<int>(p.value.sort)],
                            "type used for an element of the wrong sort or role",
                            {target, p.value}});
      } else if (vf == Flag::BundleBox) {
        has_bundle = true;
        ElementSet content = c.content(p.value);
        for (ElementId t : content) {
          if (g.flag(t) != Flag::Type || t.sort != target.sort)
            report.push_back({"bundleChain",
                              "bundle content must be types of the annotated "
                              "element's sort",
                              {p.value, t}});
        }
        if (content.empty())
          report.push_back({"bundleChain", "type bundle is empty", {p.value}});
        if (hier && !content.empty()) {
          // the content must be exactly one contiguous chain ending at top
          bool chain_ok = false;
          for (ElementId leaf : content) {
            const std::string* n = g.name(leaf);
            if (!n) continue;
            auto ch = hier->chain(target.sort, *n);
            if (!ch.ok()) continue;
            ElementSet expect;
            for (const std::string& tn : *ch)
              if (auto t = g.type_by_name(tn, target.sort)) expect.insert(*t);
            if (expect == content) {
              chain_ok = true;
              break;
            }
          }
          if (!chain_ok)
            report.push_back({"bundleChain",
                              "bundle content is not a contiguous inheritance "
                              "chain ending at top",
                              {p.value}});
        }
      }
    }
    if (has_plain_type && has_bundle)
      report.push_back({"mixedAnnotationRegime",
                        "element mixes plain and bundle type annotations", {target}});
    for (const auto& [t, uses] : type_uses)
      if (uses > 1)
        report.push_back({"notTypedTwice",
                          "element typed twice with the same type", {target, t}});
  }

  // edge-type consistency: edges sharing an edge type must have identically
  // typed sources and identically typed targets
  std::map<ElementId, std::vector<ElementId>> by_edge_type;
  for (ElementId e : c.edges()) {
    if (g.flag(e) != Flag::PlainEdge) continue;
    for (ElementId t : ann_type(g, e)) by_edge_type[t].push_back(e);
  }
  for (const auto& [t, es] : by_edge_type) {
    for (std::size_t i = 1; i < es.size(); ++i) {
      if (ann_type(g, c.src(es[0])) != ann_type(g, c.src(es[i])) ||
          ann_type(g, c.tgt(es[0])) != ann_type(g, c.tgt(es[i]))) {
        report.push_back({"edgeTypeConsistency",
                          "edges with the same edge type have differently typed "
                          "endpoints",
                          {es[0], es[i], t}});
      }
    }
  }

  return report;
}

}  // namespace tyann
