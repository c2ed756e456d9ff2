#pragma once

#include "tyann/match.hpp"
#include "tyann/structure.hpp"

namespace tyann {

// Tree-structured pattern: graphs G1..Gn with injective embeddings arranged
// as a tree rooted at graphs[0]. A graph satisfies the pattern if morphisms
// from every Gi exist that agree along the tree embeddings.
struct Pattern {
  struct TreeEdge {
    int parent = 0;
    int child = 0;
    ElementMap embed;  // graphs[parent] -> graphs[child], injective
  };
  std::vector<AGraph> graphs;
  std::vector<TreeEdge> tree;
};

inline Pattern single_pattern(AGraph g) {
  Pattern p;
  p.graphs.push_back(std::move(g));
  return p;
}

inline Report validate_pattern(const Pattern& p) {
  Report report;
  if (p.graphs.empty()) {
    report.push_back({"emptyPattern", "pattern has no graphs", {}});
    return report;
  }
  std::vector<int> incoming(p.graphs.size(), 0);
  for (const auto& te : p.tree) {
    if (te.parent < 0 || te.child <= 0 ||
        te.parent >= static_cast<int>(p.graphs.size()) ||
        te.child >= static_cast<int>(p.graphs.size())) {
      report.push_back({"badTree", "tree edge indexes out of range", {}});
      continue;
    }
    ++incoming[te.child];
    Report r = validate_element_map(p.graphs[te.parent].carrier,
                                    p.graphs[te.child].carrier, te.embed);
    if (!r.empty() || !is_injective(te.embed))
      report.push_back({"badEmbed", "tree embedding is not an injective morphism", {}});
  }
  for (std::size_t i = 1; i < p.graphs.size(); ++i)
    if (incoming[i] != 1)
      report.push_back({"badTree",
                        "every non-root graph must be the target of exactly one "
                        "tree morphism",
                        {}});
  return report;
}

// One satisfying collection: a morphism into the host per pattern graph.
using Collection = std::vector<ElementMap>;

struct PatternSat {
  bool sat = false;
  std::vector<Collection> collections;
};

// Enumerates all collections of morphisms from the pattern graphs into the
// host that agree along the tree embeddings. `pins` pre-binds elements of
// individual pattern graphs to host elements.
inline PatternSat satisfies_pattern(const AGraph& host, const Pattern& p,
                                    bool injective = false,
                                    const std::map<int, ElementMap>& pins = {},
                                    bool first_only = false) {
  PatternSat out;
  if (p.graphs.empty()) return out;

  // topological order: root first, then children of placed graphs
  std::vector<int> order{0};
  std::vector<bool> placed(p.graphs.size(), false);
  placed[0] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& te : p.tree) {
      if (placed[te.parent] && !placed[te.child]) {
        order.push_back(te.child);
        placed[te.child] = true;
        grew = true;
      }
    }
  }
  if (order.size() != p.graphs.size()) return out;  // disconnected tree

  Collection current(p.graphs.size());
  std::function<bool(std::size_t)> step = [&](std::size_t k) -> bool {
    if (k == order.size()) {
      out.collections.push_back(current);
      out.sat = true;
      return first_only;
    }
    int gi = order[k];
    MatchOptions opt;
    opt.injective = injective;
    if (auto it = pins.find(gi); it != pins.end()) opt.pinned = it->second;
    for (const auto& te : p.tree) {
      if (te.child != gi) continue;
      for (const auto& [x, y] : te.embed) opt.pinned[y] = current[te.parent].at(x);
    }
    for (ElementMap& m : enumerate_matches(p.graphs[gi], host, opt)) {
      current[gi] = std::move(m);
      if (step(k + 1)) return true;
    }
    return false;
  };
  step(0);
  return out;
}

// Flattened (colimit) form of a pattern: all graphs glued along the tree
// embeddings, with the embedding of each component graph recorded.
struct FlatPattern {
  AGraph graph;
  std::vector<ElementMap> into;  // per pattern graph
};

inline FlatPattern flatten_pattern(const Pattern& p) {
  FlatPattern out;
  out.into.resize(p.graphs.size());
  if (p.graphs.empty()) return out;
  out.into[0] = copy_into(out.graph, p.graphs[0]);
  std::vector<bool> placed(p.graphs.size(), false);
  placed[0] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& te : p.tree) {
      if (!placed[te.parent] || placed[te.child]) continue;
      // identify the child's copy of the parent with the parent's image
      ElementMap identify;
      for (const auto& [x, y] : te.embed) {
        // child element y corresponds to flattened out.into[parent][x]; glue
        // expects a map from g2 (child) elements to g1 (accumulated) ids,
        // but glue re-copies g1, so record via a two-step composition below.
        identify[y] = out.into[te.parent].at(x);
      }
      Coproduct g = glue(out.graph, p.graphs[te.child], identify);
      // re-route all existing embeddings through the new copy of the old graph
      for (auto& m : out.into)
        for (auto& [k, v] : m) v = g.in1.at(v);
      out.into[te.child] = g.in2;
      out.graph = std::move(g.graph);
      placed[te.child] = true;
      grew = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constraints

enum class ConstraintKind { Positive, Forbidden };

// Structural classification against the three typed constraint schemas.
enum class ConstraintForm { F1, F2, F3, Untyped, Ambiguous };

inline const char* to_string(ConstraintForm f) {
  switch (f) {
    case ConstraintForm::F1: return "F1";
    case ConstraintForm::F2: return "F2";
    case ConstraintForm::F3: return "F3";
    case ConstraintForm::Untyped: return "untyped";
    case ConstraintForm::Ambiguous: return "ambiguous";
  }
  return "?";
}

// Morphism between two patterns: per-graph injective morphisms preserving
// the tree structure.
struct PatternMorphism {
  std::map<int, int> graph_map;        // premise graph index -> conclusion index
  std::map<int, ElementMap> embed;     // per premise graph
};

struct Constraint {
  std::string name;
  ConstraintKind kind = ConstraintKind::Positive;
  Pattern premise;
  Pattern conclusion;      // unused for forbidden constraints
  PatternMorphism morph;   // premise -> conclusion
};

// Ordered list of constraints; cascading constraints are evaluated in
// sequence and the set holds iff every part holds.
struct ConstraintSet {
  std::string name;
  std::vector<Constraint> parts;
};

struct ConstraintVerdict {
  bool sat = true;
  // premise collections with no commuting conclusion extension (positive),
  // or matches of the forbidden graph
  std::vector<Collection> violations;
  int failing_part = -1;
};

inline ConstraintVerdict check_constraint(const AGraph& g, const Constraint& c,
                                          bool injective = false) {
  ConstraintVerdict verdict;
  if (c.kind == ConstraintKind::Forbidden) {
    PatternSat s = satisfies_pattern(g, c.premise, injective);
    if (s.sat) {
      verdict.sat = false;
      verdict.violations = std::move(s.collections);
    }
    return verdict;
  }
  PatternSat premise = satisfies_pattern(g, c.premise, injective);
  for (const Collection& S : premise.collections) {
    std::map<int, ElementMap> pins;
    for (const auto& [i, j] : c.morph.graph_map) {
      auto it = c.morph.embed.find(i);
      if (it == c.morph.embed.end()) continue;
      for (const auto& [x, y] : it->second) pins[j][y] = S[i].at(x);
    }
    PatternSat ext = satisfies_pattern(g, c.conclusion, injective, pins, true);
    if (!ext.sat) {
      verdict.sat = false;
      verdict.violations.push_back(S);
    }
  }
  return verdict;
}

inline ConstraintVerdict check_constraint_set(const AGraph& g, const ConstraintSet& cs,
                                              bool injective = false) {
  for (std::size_t i = 0; i < cs.parts.size(); ++i) {
    ConstraintVerdict v = check_constraint(g, cs.parts[i], injective);
    if (!v.sat) {
      v.failing_part = static_cast<int>(i);
      return v;
    }
  }
  return {};
}

namespace detail {

inline bool is_type_value(const AGraph& g, ElementId value) {
  Flag f = g.flag(value);
  return f == Flag::Type || f == Flag::BundleBox;
}

// Elements of conclusion graph j that are images of premise elements.
inline ElementSet premise_image(const Constraint& c, int j) {
  ElementSet out;
  for (const auto& [i, jj] : c.morph.graph_map) {
    if (jj != j) continue;
    auto it = c.morph.embed.find(i);
    if (it == c.morph.embed.end()) continue;
    for (const auto& [x, y] : it->second) out.insert(y);
  }
  return out;
}

}  // namespace detail

// Locates the distinguished element of an F1 constraint: the premise
// preimage of the element that the conclusion requires to be typed.
inline std::optional<std::pair<int, ElementId>> distinguished_element(
    const Constraint& c) {
  for (std::size_t j = 0; j < c.conclusion.graphs.size(); ++j) {
    const AGraph& cg = c.conclusion.graphs[j];
    ElementSet image = detail::premise_image(c, static_cast<int>(j));
    for (const AnnPattern& p : all_ann_patterns(cg)) {
      if (!detail::is_type_value(cg, p.value)) continue;
      if (image.count(p.ann_node) || !image.count(p.target)) continue;
      // pull the target back along the premise morphism
      for (const auto& [i, jj] : c.morph.graph_map) {
        if (jj != static_cast<int>(j)) continue;
        auto it = c.morph.embed.find(i);
        if (it == c.morph.embed.end()) continue;
        for (const auto& [x, y] : it->second)
          if (y == p.target) return std::make_pair(i, x);
      }
    }
  }
  return std::nullopt;
}

// Decides which schema a constraint instantiates, by locating where the type
// requirement sits relative to the premise image.
inline ConstraintForm classify_constraint_form(const Constraint& c) {
  bool premise_typed = false;
  for (const AGraph& pg : c.premise.graphs)
    for (const AnnPattern& p : all_ann_patterns(pg))
      if (detail::is_type_value(pg, p.value)) premise_typed = true;

  if (c.kind == ConstraintKind::Forbidden)
    return premise_typed ? ConstraintForm::Ambiguous : ConstraintForm::Untyped;

  bool new_type_on_old = false, new_type_on_new = false;
  bool conclusion_adds_structure = false;
  for (std::size_t j = 0; j < c.conclusion.graphs.size(); ++j) {
    const AGraph& cg = c.conclusion.graphs[j];
    ElementSet image = detail::premise_image(c, static_cast<int>(j));
    for (ElementId x : cg.carrier.elements())
      if (!image.count(x)) conclusion_adds_structure = true;
    for (const AnnPattern& p : all_ann_patterns(cg)) {
      if (!detail::is_type_value(cg, p.value) || image.count(p.ann_node)) continue;
      (image.count(p.target) ? new_type_on_old : new_type_on_new) = true;
    }
  }

  if (!premise_typed && !new_type_on_old && !new_type_on_new)
    return ConstraintForm::Untyped;
  if (new_type_on_old && new_type_on_new) return ConstraintForm::Ambiguous;
  if (new_type_on_old) return ConstraintForm::F1;
  if (new_type_on_new) return ConstraintForm::F2;
  if (premise_typed && conclusion_adds_structure) return ConstraintForm::F3;
  return ConstraintForm::Ambiguous;
}

}  // namespace tyann
