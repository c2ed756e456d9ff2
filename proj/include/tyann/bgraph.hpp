#pragma once

#include <algorithm>

#include "tyann/core.hpp"

namespace tyann {

// Directed graph with boxes: nodes, edges, boxes, edge endpoints and box
// containment. Boxes may contain nodes and other boxes; cnt is kept
// transitively closed by the mutators (re-closed by fixpoint).
//
// Edge endpoints are arbitrary elements. Plain structural edges run between
// nodes and boxes; edges targeting other edges only occur as `annotates`
// edges of annotation patterns (the annotation layer restricts this).
class BGraph {
 public:
  ElementId add_node() { return add(Sort::Node); }

  ElementId add_edge(ElementId src, ElementId tgt) {
    ElementId e = add(Sort::Edge);
    src_[e] = src;
    tgt_[e] = tgt;
    return e;
  }

  ElementId add_box() { return add(Sort::Box); }

  // Inserts an element with a caller-chosen id, bumping the fresh-id counter
  // past it. Used when mirroring elements across graphs.
  void add_with_id(ElementId id) {
    set_of(id.sort).insert(id);
    next_ = std::max(next_, id.value + 1);
  }

  void set_endpoints(ElementId e, ElementId src, ElementId tgt) {
    src_[e] = src;
    tgt_[e] = tgt;
  }

  // Adds x to the content of b and re-closes containment transitively.
  void add_to_box(ElementId b, ElementId x) {
    cnt_[b].insert(x);
    close_containment();
  }

  // Sets content without closing; validate_bgraph will flag missing closure.
  void add_to_box_raw(ElementId b, ElementId x) { cnt_[b].insert(x); }

  void close_containment() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& [b, content] : cnt_) {
        ElementSet extra;
        for (ElementId x : content) {
          if (x.sort == Sort::Box) {
            auto it = cnt_.find(x);
            if (it == cnt_.end()) continue;
            for (ElementId y : it->second)
              if (!content.count(y)) extra.insert(y);
          }
        }
        if (!extra.empty()) {
          content.insert(extra.begin(), extra.end());
          changed = true;
        }
      }
    }
  }

  void remove(ElementId id) {
    set_of(id.sort).erase(id);
    if (id.sort == Sort::Edge) {
      src_.erase(id);
      tgt_.erase(id);
    }
    if (id.sort == Sort::Box) cnt_.erase(id);
    for (auto& [b, content] : cnt_) content.erase(id);
  }

  const ElementSet& nodes() const { return nodes_; }
  const ElementSet& edges() const { return edges_; }
  const ElementSet& boxes() const { return boxes_; }

  const ElementSet& sort_set(Sort s) const {
    return const_cast<BGraph*>(this)->set_of(s);
  }

  bool has(ElementId id) const { return sort_set(id.sort).count(id) != 0; }

  ElementId src(ElementId e) const { return src_.at(e); }
  ElementId tgt(ElementId e) const { return tgt_.at(e); }
  bool has_endpoints(ElementId e) const { return src_.count(e) && tgt_.count(e); }

  const ElementSet& content(ElementId b) const {
    static const ElementSet empty;
    auto it = cnt_.find(b);
    return it == cnt_.end() ? empty : it->second;
  }

  bool contains(ElementId b, ElementId x) const { return content(b).count(x) != 0; }

  std::vector<ElementId> elements() const {
    std::vector<ElementId> out(nodes_.begin(), nodes_.end());
    out.insert(out.end(), edges_.begin(), edges_.end());
    out.insert(out.end(), boxes_.begin(), boxes_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t size() const { return nodes_.size() + edges_.size() + boxes_.size(); }

  std::uint32_t next_id() const { return next_; }

 private:
  ElementId add(Sort s) {
    ElementId id{s, next_++};
    set_of(s).insert(id);
    return id;
  }

  ElementSet& set_of(Sort s) {
    switch (s) {
      case Sort::Node: return nodes_;
      case Sort::Edge: return edges_;
      case Sort::Box: return boxes_;
    }
    return nodes_;
  }

  ElementSet nodes_, edges_, boxes_;
  ElementMap src_, tgt_;
  std::map<ElementId, ElementSet> cnt_;
  std::uint32_t next_ = 0;
};

// Checks all representation invariants of a B-graph. Never aborts; each
// finding names the invariant and the offending elements.
inline Report validate_bgraph(const BGraph& g) {
  Report report;
  for (ElementId e : g.edges()) {
    if (!g.has_endpoints(e)) {
      report.push_back({"endpointMissing", "edge has no source or target", {e}});
      continue;
    }
    if (!g.has(g.src(e)))
      report.push_back({"danglingSource", "edge source is not in the graph", {e, g.src(e)}});
    if (!g.has(g.tgt(e)))
      report.push_back({"danglingTarget", "edge target is not in the graph", {e, g.tgt(e)}});
  }
  for (ElementId b : g.boxes()) {
    if (g.contains(b, b))
      report.push_back({"selfContainment", "box contains itself", {b}});
    for (ElementId x : g.content(b)) {
      if (!g.has(x))
        report.push_back({"danglingContent", "box contains a missing element", {b, x}});
      if (x.sort == Sort::Edge)
        report.push_back({"edgeInBox", "box content must be nodes and boxes", {b, x}});
      // transitivity: content of a contained box must already be present
      if (x.sort == Sort::Box) {
        for (ElementId y : g.content(x)) {
          if (!g.contains(b, y))
            report.push_back({"containmentNotTransitive",
                              "content of nested box missing from outer box",
                              {b, x, y}});
        }
      }
    }
  }
  return report;
}

}  // namespace tyann
