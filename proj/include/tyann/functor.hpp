#pragma once

#include "tyann/structure.hpp"
#include "tyann/typed.hpp"

namespace tyann {

// Result of the type-annotation construction: the minimal annotated graph h
// containing disjoint copies of instance and type graph, with the typing
// recorded as one annotation pattern per instance element.
struct AnnotatedImage {
  AGraph h;
  ElementMap fg;  // instance -> h
  ElementMap ft;  // type graph -> h
};

// Builds the type-annotated image of a typed graph: disjoint immersions of
// G and TG plus one annotation pattern per element of G pointing at its
// type's copy.
inline Outcome<AnnotatedImage> type_ann_ob(const TypedGraph& t) {
  Report bad = validate_typed_graph(t);
  if (!bad.empty())
    return {std::nullopt, bad};
  AnnotatedImage img;
  img.fg = copy_into(img.h, as_annotated(t.instance));
  img.ft = copy_into(img.h, t.type_graph);
  for (ElementId x : t.instance.elements()) {
    ElementId a = img.h.add_node(Flag::AnnNode);
    img.h.add_edge(a, img.fg.at(x), Flag::AnnotatesEdge);
    img.h.add_edge(a, img.ft.at(t.tp.at(x)), Flag::WithEdge);
  }
  return Outcome<AnnotatedImage>::success(std::move(img));
}

// Lifts a type-preserving morphism m: G -> G' to a morphism between the two
// annotated images, commuting with the immersions and mapping annotation
// patterns to annotation patterns.
inline Outcome<ElementMap> type_ann_hom(const TypedGraph& a, const TypedGraph& b,
                                        const ElementMap& m,
                                        const AnnotatedImage& img_src,
                                        const AnnotatedImage& img_tgt) {
  Report mr = validate_element_map(a.instance, b.instance, m);
  if (!mr.empty())
    return Outcome<ElementMap>::failure("badMorphism",
                                        "m is not a morphism: " + describe(mr));
  if (!is_type_preserving(a, b, m))
    return Outcome<ElementMap>::failure("notTypePreserving",
                                        "m does not preserve the typing morphisms");
  ElementMap out;
  for (ElementId x : a.instance.elements())
    out[img_src.fg.at(x)] = img_tgt.fg.at(m.at(x));
  for (ElementId u : a.type_graph.carrier.elements()) {
    auto it = img_tgt.ft.find(u);
    if (it == img_tgt.ft.end())
      return Outcome<ElementMap>::failure("typeGraphMismatch",
                                          "the two images use different type graphs",
                                          {u});
    out[img_src.ft.at(u)] = it->second;
  }
  for (ElementId x : a.instance.elements()) {
    auto src_anns = annotations_of(img_src.h, img_src.fg.at(x));
    auto tgt_anns = annotations_of(img_tgt.h, img_tgt.fg.at(m.at(x)));
    if (src_anns.size() != 1 || tgt_anns.size() != 1)
      return Outcome<ElementMap>::failure("badImage",
                                          "image element lacks its unique annotation",
                                          {x});
    out[src_anns[0].ann_node] = tgt_anns[0].ann_node;
    out[src_anns[0].annotates_edge] = tgt_anns[0].annotates_edge;
    out[src_anns[0].with_edge] = tgt_anns[0].with_edge;
  }
  return Outcome<ElementMap>::success(std::move(out));
}

// Recovers typed graphs from a well-formed annotated graph. Singly annotated
// elements determine the typing; multiply annotated elements contribute one
// typed graph per type choice, and unannotated instance elements are dropped
// together with everything that references them.
inline Outcome<std::vector<TypedGraph>> extract_typed(const AGraph& h) {
  Report wf = check_well_formed(h);
  if (!wf.empty()) return {std::nullopt, wf};

  ElementSet type_elems;
  for (ElementId x : h.carrier.elements())
    if (h.flag(x) == Flag::Type) type_elems.insert(x);
  AGraph tg = subgraph(h, type_elems);

  // annotated instance elements survive; everything referencing a dropped
  // element is dropped as well
  ElementSet kept;
  for (ElementId x : h.carrier.elements())
    if (is_instance_like(h, x) && !ann_type(h, x).empty()) kept.insert(x);
  bool changed = true;
  while (changed) {
    changed = false;
    for (ElementId e : h.carrier.edges()) {
      if (!kept.count(e)) continue;
      if (!kept.count(h.carrier.src(e)) || !kept.count(h.carrier.tgt(e))) {
        kept.erase(e);
        changed = true;
      }
    }
  }
  BGraph instance = subgraph(h, kept).carrier;

  std::vector<std::pair<ElementId, std::vector<ElementId>>> choices;
  for (ElementId x : kept) {
    ElementSet types = ann_type(h, x);
    choices.emplace_back(x, std::vector<ElementId>(types.begin(), types.end()));
  }

  std::vector<TypedGraph> out;
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    TypedGraph t;
    t.instance = instance;
    t.type_graph = tg;
    for (std::size_t i = 0; i < choices.size(); ++i)
      t.tp[choices[i].first] = choices[i].second[idx[i]];
    out.push_back(std::move(t));
    // advance the choice vector
    std::size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < choices[i].second.size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  return Outcome<std::vector<TypedGraph>>::success(std::move(out));
}

// ---------------------------------------------------------------------------
// Triple-graph correspondences

// A triple graph with a discrete correspondence graph. The correspondence
// morphisms are plain element maps (corr nodes relate to elements of any
// sort, so they are not sort-respecting graph morphisms).
struct TripleGraph {
  BGraph source;
  BGraph corr;
  BGraph target;
  ElementMap left;   // corr node -> source element
  ElementMap right;  // corr node -> target element
};

inline Report validate_triple(const TripleGraph& t) {
  Report report;
  if (!t.corr.edges().empty() || !t.corr.boxes().empty())
    report.push_back({"corrNotDiscrete", "correspondence graph has edges or boxes", {}});
  for (ElementId c : t.corr.nodes()) {
    auto l = t.left.find(c);
    auto r = t.right.find(c);
    if (l == t.left.end() || !t.source.has(l->second))
      report.push_back({"corrLeftMissing", "corr node has no source image", {c}});
    if (r == t.right.end() || !t.target.has(r->second))
      report.push_back({"corrRightMissing", "corr node has no target image", {c}});
  }
  return report;
}

struct Correspondences {
  TripleGraph tri_type;  // TG <- TypeCorr -> H
  TripleGraph tri_inst;  // G <- InstCorr -> H
};

// One correspondence node per element of TG and of G, relating it to its
// copy in the annotated image.
inline Outcome<Correspondences> build_correspondences(const TypedGraph& t,
                                                      const AnnotatedImage& img) {
  Correspondences out;
  out.tri_type.source = t.type_graph.carrier;
  out.tri_type.target = img.h.carrier;
  for (ElementId u : t.type_graph.carrier.elements()) {
    auto it = img.ft.find(u);
    if (it == img.ft.end() || !img.h.carrier.has(it->second))
      return Outcome<Correspondences>::failure("mismatchedInputs",
                                               "image does not cover the type graph",
                                               {u});
    ElementId c = out.tri_type.corr.add_node();
    out.tri_type.left[c] = u;
    out.tri_type.right[c] = it->second;
  }
  out.tri_inst.source = t.instance;
  out.tri_inst.target = img.h.carrier;
  for (ElementId x : t.instance.elements()) {
    auto it = img.fg.find(x);
    if (it == img.fg.end() || !img.h.carrier.has(it->second))
      return Outcome<Correspondences>::failure("mismatchedInputs",
                                               "image does not cover the instance",
                                               {x});
    ElementId c = out.tri_inst.corr.add_node();
    out.tri_inst.left[c] = x;
    out.tri_inst.right[c] = it->second;
  }
  return Outcome<Correspondences>::success(std::move(out));
}

// One member of the AnnTypePatt family: a composition of two triple patterns
// on a common annotated target. Shapes are derived per element so endpoint
// sorts and looping types match the instance under test.
struct AnnTypePattern {
  BGraph g_pat;
  ElementId g_elem;  // distinguished instance element
  BGraph tg_pat;
  AGraph h_pat;
  std::vector<std::pair<ElementId, ElementId>> inst_links;  // (g, h) via InstCorr
  std::vector<std::pair<ElementId, ElementId>> ty_links;    // (tg, h) via TypeCorr
  std::vector<std::pair<ElementId, ElementId>> gamma;  // (g, tg) in the tp map
};

namespace detail {

// Builds the sort-indexed composition pattern, shaped after the element x
// of the typed graph (endpoint sorts, looping edge types).
inline AnnTypePattern make_ann_type_pattern(const TypedGraph& t, ElementId x) {
  AnnTypePattern p;
  auto add_inst = [&](BGraph& g, Sort s) {
    return s == Sort::Node ? g.add_node() : g.add_box();
  };
  auto h_add = [&](Sort s, Flag f) {
    ElementId id = s == Sort::Node ? p.h_pat.carrier.add_node()
                                   : p.h_pat.carrier.add_box();
    p.h_pat.flags[id] = f;
    return id;
  };
  auto annotate_pair = [&](ElementId inst, ElementId type) {
    ElementId a = p.h_pat.add_node(Flag::AnnNode);
    p.h_pat.add_edge(a, inst, Flag::AnnotatesEdge);
    p.h_pat.add_edge(a, type, Flag::WithEdge);
  };

  if (x.sort != Sort::Edge) {
    p.g_elem = add_inst(p.g_pat, x.sort);
    ElementId ty = add_inst(p.tg_pat, x.sort);
    ElementId hi = h_add(x.sort, Flag::Instance);
    ElementId ht = h_add(x.sort, Flag::Type);
    annotate_pair(hi, ht);
    p.inst_links = {{p.g_elem, hi}};
    p.ty_links = {{ty, ht}};
    p.gamma = {{p.g_elem, ty}};
    return p;
  }

  // edge composition: the edge with its endpoints on every level
  ElementId su = t.instance.src(x), sv = t.instance.tgt(x);
  ElementId gu = add_inst(p.g_pat, su.sort);
  ElementId gv = su == sv ? gu : add_inst(p.g_pat, sv.sort);
  p.g_elem = p.g_pat.add_edge(gu, gv);

  ElementId tu = t.tp.at(su), tv = t.tp.at(sv);
  ElementId pu = add_inst(p.tg_pat, tu.sort);
  ElementId pv = tu == tv ? pu : add_inst(p.tg_pat, tv.sort);
  ElementId pe = p.tg_pat.add_edge(pu, pv);

  ElementId hu = h_add(su.sort, Flag::Instance);
  ElementId hv = su == sv ? hu : h_add(sv.sort, Flag::Instance);
  ElementId he = p.h_pat.add_edge(hu, hv, Flag::PlainEdge);
  ElementId htu = h_add(tu.sort, Flag::Type);
  ElementId htv = tu == tv ? htu : h_add(tv.sort, Flag::Type);
  ElementId hte = p.h_pat.add_edge(htu, htv, Flag::Type);
  annotate_pair(he, hte);

  p.inst_links = {{p.g_elem, he}, {gu, hu}, {gv, hv}};
  p.ty_links = {{pe, hte}, {pu, htu}, {pv, htv}};
  p.gamma = {{p.g_elem, pe}, {gu, pu}, {gv, pv}};
  return p;
}

inline bool link_realized(const TripleGraph& tri, ElementId src_el, ElementId tgt_el) {
  for (ElementId c : tri.corr.nodes())
    if (tri.left.at(c) == src_el && tri.right.at(c) == tgt_el) return true;
  return false;
}

}  // namespace detail

struct TripleWitness {
  ElementId element;
  ElementMap g_match, tg_match, h_match;
};

struct TripleVerdict {
  bool ok = true;
  std::optional<ElementId> failing;
  std::vector<TripleWitness> witnesses;
};

// Checks, for every element of G per sort, that the composition of triple
// patterns for its sort is satisfied: injective matches in each component,
// correspondence links realized by corr nodes, and the typing-map atoms
// satisfied.
inline TripleVerdict satisfies_ann_type_patterns(const TypedGraph& t,
                                                 const AnnotatedImage& img,
                                                 const Correspondences& corr) {
  TripleVerdict verdict;
  for (ElementId x : t.instance.elements()) {
    AnnTypePattern pat = detail::make_ann_type_pattern(t, x);
    bool found = false;
    MatchOptions g_opt;
    g_opt.injective = true;
    g_opt.pinned[pat.g_elem] = x;
    for (const ElementMap& mg : enumerate_matches(pat.g_pat, t.instance, g_opt)) {
      for (const ElementMap& mt :
           enumerate_matches(pat.tg_pat, t.type_graph.carrier, {})) {
        // gamma: the (instance, type) pairs must lie in the tp map
        bool gamma_ok = true;
        for (auto [ga, ta] : pat.gamma)
          if (t.tp.at(mg.at(ga)) != mt.at(ta)) gamma_ok = false;
        if (!gamma_ok) continue;
        for (const ElementMap& mh : enumerate_matches(pat.h_pat, img.h, MatchOptions{})) {
          bool links_ok = true;
          for (auto [g_el, h_el] : pat.inst_links)
            if (!detail::link_realized(corr.tri_inst, mg.at(g_el), mh.at(h_el)))
              links_ok = false;
          for (auto [tg_el, h_el] : pat.ty_links)
            if (!detail::link_realized(corr.tri_type, mt.at(tg_el), mh.at(h_el)))
              links_ok = false;
          if (!links_ok) continue;
          verdict.witnesses.push_back({x, mg, mt, mh});
          found = true;
          break;
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) {
      verdict.ok = false;
      if (!verdict.failing) verdict.failing = x;
    }
  }
  return verdict;
}

}  // namespace tyann
