#pragma once

#include "tyann/annotate.hpp"

namespace tyann {

// Classical typing: an instance graph, a type graph whose elements are all
// named type elements, and a typing morphism between the carriers.
struct TypedGraph {
  BGraph instance;
  AGraph type_graph;
  ElementMap tp;  // instance element -> type element
};

inline Report validate_typed_graph(const TypedGraph& t) {
  Report report = validate_bgraph(t.instance);
  Report tg = validate_bgraph(t.type_graph.carrier);
  report.insert(report.end(), tg.begin(), tg.end());
  std::map<std::pair<int, std::string>, ElementId> names;
  for (ElementId x : t.type_graph.carrier.elements()) {
    if (t.type_graph.flag(x) != Flag::Type)
      report.push_back({"notAType", "type graph element is not flagged as type", {x}});
    const std::string* n = t.type_graph.name(x);
    if (!n || n->empty())
      report.push_back({"typeUnnamed", "type graph element has no name", {x}});
    else {
      auto key = std::make_pair(static_cast<int>(x.sort), *n);
      auto [it, fresh] = names.emplace(key, x);
      if (!fresh)
        report.push_back({"typeNameClash", "two type elements share name " + *n,
                          {it->second, x}});
    }
  }
  Report mor = validate_element_map(t.instance, t.type_graph.carrier, t.tp);
  for (auto& v : mor) {
    v.message = "typing morphism: " + v.message;
    report.push_back(v);
  }
  return report;
}

// A morphism between graphs typed over the same type graph is type
// preserving when tp' after m equals tp.
inline bool is_type_preserving(const TypedGraph& a, const TypedGraph& b,
                               const ElementMap& m) {
  for (ElementId x : a.instance.elements()) {
    auto it = m.find(x);
    if (it == m.end()) return false;
    auto tb = b.tp.find(it->second);
    if (tb == b.tp.end() || tb->second != a.tp.at(x)) return false;
  }
  return true;
}

}  // namespace tyann
