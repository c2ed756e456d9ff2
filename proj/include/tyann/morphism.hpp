#pragma once

#include "tyann/bgraph.hpp"

namespace tyann {

inline ElementId apply(const ElementMap& m, ElementId x) { return m.at(x); }

inline bool is_injective(const ElementMap& m) {
  ElementSet seen;
  for (const auto& [k, v] : m)
    if (!seen.insert(v).second) return false;
  return true;
}

inline ElementMap compose(const ElementMap& first, const ElementMap& second) {
  ElementMap out;
  for (const auto& [k, v] : first) out[k] = second.at(v);
  return out;
}

inline ElementMap identity_map(const BGraph& g) {
  ElementMap out;
  for (ElementId x : g.elements()) out[x] = x;
  return out;
}

inline ElementMap inverse(const ElementMap& m) {
  ElementMap out;
  for (const auto& [k, v] : m) out[v] = k;
  return out;
}

// Structure-preservation check for a candidate element map between two
// B-graphs: totality per sort, sort respect, and commutation with src, tgt
// and containment.
inline Report validate_element_map(const BGraph& src, const BGraph& tgt,
                                   const ElementMap& map) {
  Report report;
  for (ElementId x : src.elements()) {
    auto it = map.find(x);
    if (it == map.end()) {
      report.push_back({"notTotal", "element has no image", {x}});
      continue;
    }
    ElementId y = it->second;
    if (y.sort != x.sort)
      report.push_back({"sortMismatch", "image has a different sort", {x, y}});
    else if (!tgt.has(y))
      report.push_back({"imageMissing", "image is not in the target graph", {x, y}});
  }
  if (!report.empty()) return report;

  for (ElementId e : src.edges()) {
    ElementId e2 = map.at(e);
    if (map.at(src.src(e)) != tgt.src(e2))
      report.push_back({"sourceNotPreserved", "source not preserved at edge", {e}});
    if (map.at(src.tgt(e)) != tgt.tgt(e2))
      report.push_back({"targetNotPreserved", "target not preserved at edge", {e}});
  }
  for (ElementId b : src.boxes()) {
    for (ElementId x : src.content(b)) {
      if (!tgt.contains(map.at(b), map.at(x)))
        report.push_back({"containmentNotPreserved",
                          "containment not preserved", {b, x}});
    }
  }
  return report;
}

// A B-graph morphism with its endpoints. The element map is keyed by source
// element; sorts are embedded in the ids, so one map covers fV, fE and fB.
struct GraphMorphism {
  BGraph source;
  BGraph target;
  ElementMap map;

  ElementId operator()(ElementId x) const { return map.at(x); }
};

inline Report validate_morphism(const GraphMorphism& m) {
  return validate_element_map(m.source, m.target, m.map);
}

}  // namespace tyann
