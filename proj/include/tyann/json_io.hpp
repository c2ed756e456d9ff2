#pragma once

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tyann/adapt.hpp"
#include "tyann/annotate.hpp"
#include "tyann/functor.hpp"

// On-disk form mirrors the in-memory model exactly: annotations are stored
// as their annotation-node triples, never as a typing shorthand, and typing
// morphisms are explicit element-pair maps. Canonical form is nlohmann's
// sorted-key dump with two-space indent plus a trailing newline, which makes
// save after load byte-identical.

namespace tyann {

using json = nlohmann::json;

inline std::optional<Flag> parse_flag(const std::string& s) {
  for (Flag f : {Flag::Instance, Flag::Type, Flag::AnnNode, Flag::BundleBox,
                 Flag::AnnotatesEdge, Flag::WithEdge, Flag::PlainEdge})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

inline std::optional<Sort> parse_sort(const std::string& s) {
  for (Sort x : {Sort::Node, Sort::Edge, Sort::Box})
    if (s == to_string(x)) return x;
  return std::nullopt;
}

// Annotated graph together with its stable external element ids.
struct GraphDoc {
  std::string name;
  AGraph graph;
  std::map<std::string, ElementId> ids;

  std::string id_of(ElementId x) const {
    for (const auto& [s, e] : ids)
      if (e == x) return s;
    return std::string(1, "neb"[static_cast<int>(x.sort)]) + std::to_string(x.value);
  }
};

// Wraps a graph built in memory, deriving external ids from the element ids.
inline GraphDoc as_doc(AGraph g, std::string name = {}) {
  GraphDoc doc;
  doc.name = std::move(name);
  doc.graph = std::move(g);
  for (ElementId x : doc.graph.carrier.elements()) doc.ids[doc.id_of(x)] = x;
  return doc;
}

inline json graph_body_to_json(const GraphDoc& doc) {
  json body = json::object();
  if (!doc.name.empty()) body["name"] = doc.name;
  std::map<ElementId, std::string> rev;
  for (const auto& [s, e] : doc.ids) rev[e] = s;
  auto ext = [&](ElementId x) {
    auto it = rev.find(x);
    return it != rev.end() ? it->second : doc.id_of(x);
  };
  auto element_json = [&](ElementId x) {
    json j = json::object();
    j["id"] = ext(x);
    j["flag"] = to_string(doc.graph.flag(x));
    if (const std::string* n = doc.graph.name(x)) j["name"] = *n;
    return j;
  };
  body["nodes"] = json::array();
  for (ElementId n : doc.graph.carrier.nodes()) body["nodes"].push_back(element_json(n));
  body["edges"] = json::array();
  for (ElementId e : doc.graph.carrier.edges()) {
    json j = element_json(e);
    if (doc.graph.carrier.has_endpoints(e)) {
      j["src"] = ext(doc.graph.carrier.src(e));
      j["tgt"] = ext(doc.graph.carrier.tgt(e));
    }
    body["edges"].push_back(j);
  }
  body["boxes"] = json::array();
  for (ElementId b : doc.graph.carrier.boxes()) {
    json j = element_json(b);
    std::vector<std::string> contains;
    for (ElementId x : doc.graph.carrier.content(b)) contains.push_back(ext(x));
    std::sort(contains.begin(), contains.end());
    j["contains"] = contains;
    body["boxes"].push_back(j);
  }
  return body;
}

inline json to_json(const GraphDoc& doc) {
  json j = graph_body_to_json(doc);
  j["kind"] = "graph";
  return j;
}

inline Outcome<GraphDoc> graph_body_from_json(const json& body) {
  using Out = Outcome<GraphDoc>;
  if (!body.is_object()) return Out::failure("schema", "graph body is not an object");
  GraphDoc doc;
  if (body.contains("name")) doc.name = body["name"].get<std::string>();

  struct Pending {
    std::string id, src, tgt;
  };
  std::vector<Pending> pending_edges;
  std::vector<std::pair<std::string, std::vector<std::string>>> pending_boxes;

  auto read_element = [&](const json& j, Sort sort,
                          std::string& id_out) -> std::optional<Violation> {
    if (!j.contains("id") || !j["id"].is_string())
      return Violation{"schema", std::string(to_string(sort)) + " without id", {}};
    std::string id = j["id"].get<std::string>();
    if (doc.ids.count(id))
      return Violation{"schema", "duplicate element id " + id, {}};
    ElementId x;
    switch (sort) {
      case Sort::Node: x = doc.graph.carrier.add_node(); break;
      case Sort::Edge: x = doc.graph.carrier.add_edge(x, x); break;
      case Sort::Box: x = doc.graph.carrier.add_box(); break;
    }
    Flag f = default_flag(sort);
    if (j.contains("flag")) {
      auto pf = parse_flag(j["flag"].get<std::string>());
      if (!pf || !flag_fits_sort(*pf, sort))
        return Violation{"schema", "element " + id + ": bad flag", {x}};
      f = *pf;
    }
    doc.graph.flags[x] = f;
    if (j.contains("name")) doc.graph.names[x] = j["name"].get<std::string>();
    doc.ids[id] = x;
    id_out = id;
    return std::nullopt;
  };

  for (const char* key : {"nodes", "edges", "boxes"}) {
    if (!body.contains(key)) continue;
    if (!body[key].is_array())
      return Out::failure("schema", std::string(key) + " is not an array");
    Sort sort = key[0] == 'n' ? Sort::Node : key[0] == 'e' ? Sort::Edge : Sort::Box;
    for (const json& j : body[key]) {
      std::string id;
      if (auto err = read_element(j, sort, id)) {
        Out out;
        out.issues.push_back(*err);
        return out;
      }
      if (sort == Sort::Edge) {
        if (!j.contains("src") || !j.contains("tgt"))
          return Out::failure("schema", "edge " + id + ": missing src or tgt");
        pending_edges.push_back(
            {id, j["src"].get<std::string>(), j["tgt"].get<std::string>()});
      }
      if (sort == Sort::Box && j.contains("contains")) {
        std::vector<std::string> content;
        for (const json& c : j["contains"]) content.push_back(c.get<std::string>());
        pending_boxes.emplace_back(id, std::move(content));
      }
    }
  }
  for (const Pending& p : pending_edges) {
    auto s = doc.ids.find(p.src), t = doc.ids.find(p.tgt);
    if (s == doc.ids.end() || t == doc.ids.end())
      return Out::failure("schema", "edge " + p.id + ": unknown endpoint");
    doc.graph.carrier.set_endpoints(doc.ids.at(p.id), s->second, t->second);
  }
  for (const auto& [bid, content] : pending_boxes) {
    for (const std::string& cid : content) {
      auto c = doc.ids.find(cid);
      if (c == doc.ids.end())
        return Out::failure("schema", "box " + bid + ": unknown content " + cid);
      doc.graph.carrier.add_to_box_raw(doc.ids.at(bid), c->second);
    }
  }
  doc.graph.carrier.close_containment();
  Report bad = validate_bgraph(doc.graph.carrier);
  if (!bad.empty()) return {std::nullopt, bad};
  return Out::success(std::move(doc));
}

inline Outcome<GraphDoc> graph_from_json(const json& j) {
  return graph_body_from_json(j);
}

namespace detail {

// External-id rendering of an element map between two documents.
inline json map_to_json(const ElementMap& m, const GraphDoc& from, const GraphDoc& to) {
  json j = json::object();
  for (const auto& [x, y] : m) j[from.id_of(x)] = to.id_of(y);
  return j;
}

inline Outcome<ElementMap> map_from_json(const json& j, const GraphDoc& from,
                                         const GraphDoc& to, const char* what) {
  using Out = Outcome<ElementMap>;
  ElementMap out;
  if (!j.is_object()) return Out::failure("schema", std::string(what) + " is not a map");
  for (const auto& [k, v] : j.items()) {
    auto a = from.ids.find(k);
    auto b = to.ids.find(v.get<std::string>());
    if (a == from.ids.end() || b == to.ids.end())
      return Out::failure("schema",
                          std::string(what) + ": unknown element " + k + " or " +
                              v.get<std::string>());
    out[a->second] = b->second;
  }
  return Out::success(std::move(out));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Patterns and constraints

struct PatternDoc {
  Pattern pattern;
  std::vector<GraphDoc> docs;  // one per pattern graph, shares the AGraphs
};

inline PatternDoc as_doc(const Pattern& p) {
  PatternDoc out;
  out.pattern = p;
  for (const AGraph& g : p.graphs) out.docs.push_back(as_doc(g));
  return out;
}

inline json to_json(const PatternDoc& p) {
  json j = json::object();
  j["graphs"] = json::array();
  for (const GraphDoc& d : p.docs) j["graphs"].push_back(graph_body_to_json(d));
  j["tree"] = json::array();
  for (const auto& te : p.pattern.tree) {
    json t = json::object();
    t["parent"] = te.parent;
    t["child"] = te.child;
    t["embed"] = detail::map_to_json(te.embed, p.docs[te.parent], p.docs[te.child]);
    j["tree"].push_back(t);
  }
  return j;
}

inline Outcome<PatternDoc> pattern_from_json(const json& j) {
  using Out = Outcome<PatternDoc>;
  if (!j.is_object() || !j.contains("graphs") || !j["graphs"].is_array())
    return Out::failure("schema", "pattern without graphs array");
  PatternDoc out;
  for (const json& gj : j["graphs"]) {
    auto d = graph_body_from_json(gj);
    if (!d.ok()) return {std::nullopt, d.issues};
    out.pattern.graphs.push_back(d->graph);
    out.docs.push_back(std::move(*d));
  }
  if (j.contains("tree")) {
    for (const json& tj : j["tree"]) {
      Pattern::TreeEdge te;
      te.parent = tj.value("parent", 0);
      te.child = tj.value("child", 0);
      if (te.parent < 0 || te.child < 0 ||
          te.parent >= static_cast<int>(out.docs.size()) ||
          te.child >= static_cast<int>(out.docs.size()))
        return Out::failure("schema", "pattern tree index out of range");
      auto m = detail::map_from_json(tj.value("embed", json::object()),
                                     out.docs[te.parent], out.docs[te.child],
                                     "pattern tree embed");
      if (!m.ok()) return {std::nullopt, m.issues};
      te.embed = std::move(*m);
      out.pattern.tree.push_back(std::move(te));
    }
  }
  Report bad = validate_pattern(out.pattern);
  if (!bad.empty()) return {std::nullopt, bad};
  return Out::success(std::move(out));
}

struct ConstraintDoc {
  ConstraintSet set;
  // parallel to set.parts, for id-stable serialization
  std::vector<PatternDoc> premises, conclusions;
};

inline ConstraintDoc as_doc(const ConstraintSet& cs) {
  ConstraintDoc out;
  out.set = cs;
  for (const Constraint& c : cs.parts) {
    out.premises.push_back(as_doc(c.premise));
    out.conclusions.push_back(as_doc(c.conclusion));
  }
  return out;
}

inline json to_json(const ConstraintDoc& doc) {
  json j = json::object();
  j["kind"] = "constraint";
  j["name"] = doc.set.name;
  j["parts"] = json::array();
  for (std::size_t i = 0; i < doc.set.parts.size(); ++i) {
    const Constraint& c = doc.set.parts[i];
    json p = json::object();
    p["kind"] = c.kind == ConstraintKind::Forbidden ? "forbidden" : "positive";
    p["premise"] = to_json(doc.premises[i]);
    if (c.kind == ConstraintKind::Positive) {
      p["conclusion"] = to_json(doc.conclusions[i]);
      json morph = json::object();
      morph["graphs"] = json::object();
      morph["embed"] = json::object();
      for (const auto& [gi, gj] : c.morph.graph_map)
        morph["graphs"][std::to_string(gi)] = gj;
      for (const auto& [gi, m] : c.morph.embed) {
        int gj = c.morph.graph_map.at(gi);
        morph["embed"][std::to_string(gi)] =
            detail::map_to_json(m, doc.premises[i].docs[gi],
                                doc.conclusions[i].docs[gj]);
      }
      p["morphism"] = morph;
    }
    j["parts"].push_back(p);
  }
  return j;
}

inline Outcome<ConstraintDoc> constraint_from_json(const json& j) {
  using Out = Outcome<ConstraintDoc>;
  ConstraintDoc out;
  out.set.name = j.value("name", "");
  if (!j.contains("parts") || !j["parts"].is_array())
    return Out::failure("schema", "constraint without parts array");
  for (const json& pj : j["parts"]) {
    Constraint c;
    c.name = out.set.name;
    if (out.set.parts.size() > 0)
      c.name += "#" + std::to_string(out.set.parts.size());
    std::string kind = pj.value("kind", "positive");
    c.kind = kind == "forbidden" ? ConstraintKind::Forbidden : ConstraintKind::Positive;
    auto prem = pattern_from_json(pj.value("premise", json::object()));
    if (!prem.ok()) return {std::nullopt, prem.issues};
    c.premise = prem->pattern;
    PatternDoc conc_doc;
    if (c.kind == ConstraintKind::Positive) {
      auto conc = pattern_from_json(pj.value("conclusion", json::object()));
      if (!conc.ok()) return {std::nullopt, conc.issues};
      c.conclusion = conc->pattern;
      conc_doc = std::move(*conc);
      const json morph = pj.value("morphism", json::object());
      const json graphs = morph.value("graphs", json::object());
      const json embeds = morph.value("embed", json::object());
      for (const auto& [k, v] : graphs.items())
        c.morph.graph_map[std::stoi(k)] = v.get<int>();
      for (const auto& [k, v] : embeds.items()) {
        int gi = std::stoi(k);
        auto gj = c.morph.graph_map.find(gi);
        if (gj == c.morph.graph_map.end() ||
            gi >= static_cast<int>(prem->docs.size()) ||
            gj->second >= static_cast<int>(conc_doc.docs.size()))
          return Out::failure("schema", "constraint morphism index out of range");
        auto m = detail::map_from_json(v, prem->docs[gi], conc_doc.docs[gj->second],
                                       "constraint morphism");
        if (!m.ok()) return {std::nullopt, m.issues};
        c.morph.embed[gi] = std::move(*m);
      }
    }
    out.premises.push_back(std::move(*prem));
    out.conclusions.push_back(std::move(conc_doc));
    out.set.parts.push_back(std::move(c));
  }
  return Out::success(std::move(out));
}

// ---------------------------------------------------------------------------
// Rules

struct RuleDoc {
  Rule rule;
  GraphDoc L, K, R;
  std::vector<GraphDoc> acs;  // parallel to rule.acs
  std::optional<TypeChangeRule> type_change;
};

inline RuleDoc as_doc(const Rule& r) {
  RuleDoc out;
  out.rule = r;
  out.L = as_doc(r.L);
  out.K = as_doc(r.K);
  out.R = as_doc(r.R);
  for (const AppCond& ac : r.acs) out.acs.push_back(as_doc(ac.ac));
  return out;
}

inline RuleDoc as_doc(const TypeChangeRule& t) {
  RuleDoc out = as_doc(t.rule);
  out.type_change = t;
  return out;
}

inline json to_json(const RuleDoc& doc) {
  json j = json::object();
  j["kind"] = "rule";
  j["name"] = doc.rule.name;
  j["L"] = graph_body_to_json(doc.L);
  j["K"] = graph_body_to_json(doc.K);
  j["R"] = graph_body_to_json(doc.R);
  j["l"] = detail::map_to_json(doc.rule.l, doc.K, doc.L);
  j["r"] = detail::map_to_json(doc.rule.r, doc.K, doc.R);
  if (!doc.rule.acs.empty()) {
    j["acs"] = json::array();
    for (std::size_t i = 0; i < doc.rule.acs.size(); ++i) {
      json a = json::object();
      a["positive"] = doc.rule.acs[i].positive;
      a["graph"] = graph_body_to_json(doc.acs[i]);
      a["embed"] = detail::map_to_json(doc.rule.acs[i].embed, doc.L, doc.acs[i]);
      j["acs"].push_back(a);
    }
  }
  if (doc.type_change) {
    json tc = json::object();
    tc["element"] = doc.L.id_of(doc.type_change->element);
    tc["sort"] = to_string(doc.type_change->sort);
    tc["from"] = doc.type_change->from_type;
    tc["to"] = doc.type_change->to_type;
    j["typeChange"] = tc;
  }
  return j;
}

inline Outcome<RuleDoc> rule_from_json(const json& j) {
  using Out = Outcome<RuleDoc>;
  RuleDoc out;
  out.rule.name = j.value("name", "");
  for (auto [key, doc] : {std::pair<const char*, GraphDoc*>{"L", &out.L},
                          {"K", &out.K},
                          {"R", &out.R}}) {
    if (!j.contains(key))
      return Out::failure("schema", std::string("rule without ") + key);
    auto g = graph_body_from_json(j[key]);
    if (!g.ok()) return {std::nullopt, g.issues};
    *doc = std::move(*g);
  }
  out.rule.L = out.L.graph;
  out.rule.K = out.K.graph;
  out.rule.R = out.R.graph;
  auto l = detail::map_from_json(j.value("l", json::object()), out.K, out.L, "rule l");
  if (!l.ok()) return {std::nullopt, l.issues};
  out.rule.l = std::move(*l);
  auto r = detail::map_from_json(j.value("r", json::object()), out.K, out.R, "rule r");
  if (!r.ok()) return {std::nullopt, r.issues};
  out.rule.r = std::move(*r);
  if (j.contains("acs")) {
    for (const json& aj : j["acs"]) {
      AppCond ac;
      ac.positive = aj.value("positive", false);
      auto g = graph_body_from_json(aj.value("graph", json::object()));
      if (!g.ok()) return {std::nullopt, g.issues};
      ac.ac = g->graph;
      auto m = detail::map_from_json(aj.value("embed", json::object()), out.L, *g,
                                     "application condition embed");
      if (!m.ok()) return {std::nullopt, m.issues};
      ac.embed = std::move(*m);
      out.acs.push_back(std::move(*g));
      out.rule.acs.push_back(std::move(ac));
    }
  }
  Report bad = validate_rule(out.rule);
  if (!bad.empty()) return {std::nullopt, bad};
  if (j.contains("typeChange")) {
    const json& tc = j["typeChange"];
    TypeChangeRule t;
    t.rule = out.rule;
    auto el = out.L.ids.find(tc.value("element", ""));
    if (el == out.L.ids.end())
      return Out::failure("schema", "typeChange element not in L");
    t.element = el->second;
    auto sort = parse_sort(tc.value("sort", "node"));
    if (!sort) return Out::failure("schema", "typeChange with bad sort");
    t.sort = *sort;
    t.from_type = tc.value("from", "");
    t.to_type = tc.value("to", "");
    Report tr = validate_type_change_rule(t);
    if (!tr.empty()) return {std::nullopt, tr};
    out.type_change = std::move(t);
  }
  return Out::success(std::move(out));
}

// ---------------------------------------------------------------------------
// Typed graphs and hierarchies

struct TypedDoc {
  std::string name;
  TypedGraph typed;
  GraphDoc instance, type_graph;
};

inline TypedDoc as_doc(const TypedGraph& t, std::string name = {}) {
  TypedDoc out;
  out.name = std::move(name);
  out.typed = t;
  out.instance = as_doc(as_annotated(t.instance));
  out.type_graph = as_doc(t.type_graph);
  return out;
}

inline json to_json(const TypedDoc& doc) {
  json j = json::object();
  j["kind"] = "typedGraph";
  if (!doc.name.empty()) j["name"] = doc.name;
  j["instance"] = graph_body_to_json(doc.instance);
  j["typeGraph"] = graph_body_to_json(doc.type_graph);
  j["tp"] = detail::map_to_json(doc.typed.tp, doc.instance, doc.type_graph);
  return j;
}

inline Outcome<TypedDoc> typed_from_json(const json& j) {
  using Out = Outcome<TypedDoc>;
  TypedDoc out;
  out.name = j.value("name", "");
  auto inst = graph_body_from_json(j.value("instance", json::object()));
  if (!inst.ok()) return {std::nullopt, inst.issues};
  auto tg = graph_body_from_json(j.value("typeGraph", json::object()));
  if (!tg.ok()) return {std::nullopt, tg.issues};
  out.instance = std::move(*inst);
  out.type_graph = std::move(*tg);
  out.typed.instance = out.instance.graph.carrier;
  out.typed.type_graph = out.type_graph.graph;
  auto tp = detail::map_from_json(j.value("tp", json::object()), out.instance,
                                  out.type_graph, "tp");
  if (!tp.ok()) return {std::nullopt, tp.issues};
  out.typed.tp = std::move(*tp);
  Report bad = validate_typed_graph(out.typed);
  if (!bad.empty()) return {std::nullopt, bad};
  return Out::success(std::move(out));
}

inline json to_json(const TypeHierarchy& h, const std::string& name = {}) {
  json j = json::object();
  j["kind"] = "hierarchy";
  if (!name.empty()) j["name"] = name;
  j["sorts"] = json::object();
  for (const auto& [sort, per] : h.sorts) {
    json s = json::object();
    s["top"] = per.top;
    s["parent"] = json::object();
    for (const auto& [t, p] : per.parent) s["parent"][t] = p;
    j["sorts"][to_string(sort)] = s;
  }
  return j;
}

inline Outcome<TypeHierarchy> hierarchy_from_json(const json& j) {
  using Out = Outcome<TypeHierarchy>;
  TypeHierarchy h;
  const json sorts = j.value("sorts", json::object());
  for (const auto& [k, v] : sorts.items()) {
    auto sort = parse_sort(k);
    if (!sort) return Out::failure("schema", "hierarchy with bad sort " + k);
    TypeHierarchy::PerSort per;
    per.top = v.value("top", "");
    const json parents = v.value("parent", json::object());
    for (const auto& [t, p] : parents.items()) per.parent[t] = p.get<std::string>();
    h.sorts[*sort] = std::move(per);
  }
  Report bad = h.validate();
  if (!bad.empty()) return {std::nullopt, bad};
  return Out::success(std::move(h));
}

// ---------------------------------------------------------------------------
// Files and the workspace

inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

inline Outcome<json> read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Outcome<json>::failure("io", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    return Outcome<json>::failure("schema", "invalid JSON in " + path);
  return Outcome<json>::success(std::move(j));
}

inline bool write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) return false;
  out << canonical_dump(j);
  return bool(out);
}

// Named artifacts loaded from files. Every artifact passed its validator at
// registration time (well-formedness of annotations is a separate, per
// command concern).
struct Workspace {
  std::map<std::string, GraphDoc> graphs;
  std::map<std::string, RuleDoc> rules;
  std::map<std::string, ConstraintDoc> constraints;
  std::map<std::string, TypedDoc> typed;
  std::map<std::string, TypeHierarchy> hierarchies;

  // Registers one parsed artifact, dispatching on its "kind".
  Outcome<std::string> load_json(const json& j, const std::string& fallback_name) {
    using Out = Outcome<std::string>;
    std::string kind = j.value("kind", "graph");
    std::string name = j.value("name", fallback_name);
    if (kind == "graph") {
      auto d = graph_from_json(j);
      if (!d.ok()) return {std::nullopt, d.issues};
      if (d->name.empty()) d->name = name;
      graphs[name] = std::move(*d);
    } else if (kind == "rule") {
      auto d = rule_from_json(j);
      if (!d.ok()) return {std::nullopt, d.issues};
      rules[name] = std::move(*d);
    } else if (kind == "constraint") {
      auto d = constraint_from_json(j);
      if (!d.ok()) return {std::nullopt, d.issues};
      constraints[name] = std::move(*d);
    } else if (kind == "typedGraph") {
      auto d = typed_from_json(j);
      if (!d.ok()) return {std::nullopt, d.issues};
      typed[name] = std::move(*d);
    } else if (kind == "hierarchy") {
      auto d = hierarchy_from_json(j);
      if (!d.ok()) return {std::nullopt, d.issues};
      hierarchies[name] = std::move(*d);
    } else {
      return Out::failure("schema", "unknown artifact kind " + kind);
    }
    return Out::success(std::move(name));
  }

  Outcome<std::string> load_file(const std::string& path) {
    auto j = read_json_file(path);
    if (!j.ok()) return {std::nullopt, j.issues};
    std::string base = path;
    if (auto slash = base.find_last_of('/'); slash != std::string::npos)
      base = base.substr(slash + 1);
    if (auto dot = base.find_last_of('.'); dot != std::string::npos)
      base = base.substr(0, dot);
    return load_json(*j, base);
  }
};

}  // namespace tyann
