#pragma once

#include "tyann/match.hpp"
#include "tyann/structure.hpp"

namespace tyann {

// Application condition ac: L -> AC. Positive conditions require an
// extension of the match to AC, negative ones forbid it.
struct AppCond {
  bool positive = false;
  AGraph ac;
  ElementMap embed;  // L -> ac, injective
};

// DPO rule L <-l- K -r-> R over annotated graphs. Plain B-graph rules are
// the special case with default flags and no names.
struct Rule {
  std::string name;
  AGraph L, K, R;
  ElementMap l;  // K -> L
  ElementMap r;  // K -> R
  std::vector<AppCond> acs;
};

inline Rule identity_rule(const AGraph& g) {
  Rule rule;
  rule.L = rule.K = rule.R = g;
  rule.l = rule.r = identity_map(g.carrier);
  return rule;
}

inline Report validate_rule(const Rule& rule) {
  Report report;
  auto check_leg = [&](const ElementMap& leg, const AGraph& tgt, const char* which) {
    Report r = validate_element_map(rule.K.carrier, tgt.carrier, leg);
    for (auto& v : r) {
      v.message = std::string(which) + ": " + v.message;
      report.push_back(v);
    }
    if (!is_injective(leg))
      report.push_back({"notInjective", std::string(which) + " is not injective", {}});
    for (const auto& [k, x] : leg)
      if (rule.K.flag(k) != tgt.flag(x))
        report.push_back({"flagNotPreserved",
                          std::string(which) + " changes an element role", {k, x}});
  };
  check_leg(rule.l, rule.L, "l");
  check_leg(rule.r, rule.R, "r");
  for (const auto& ac : rule.acs)
    if (!is_injective(ac.embed))
      report.push_back({"acNotInjective", "application condition embedding not injective", {}});
  return report;
}

inline bool application_conditions_hold(const Rule& rule, const AGraph& host,
                                        const ElementMap& match,
                                        const AppCond** failing = nullptr) {
  for (const auto& ac : rule.acs) {
    MatchOptions opt;
    opt.injective = true;
    for (const auto& [x, y] : ac.embed) opt.pinned[y] = match.at(x);
    bool found = !enumerate_matches(ac.ac, host, opt).empty();
    if (found != ac.positive) {
      if (failing) *failing = &ac;
      return false;
    }
  }
  return true;
}

struct Applied {
  AGraph result;
  ElementMap comatch;  // R -> result
  Report log;          // informational, e.g. cascaded annotation cleanup
};

struct ApplyOptions {
  // Delete annotation patterns whose annotated element or value is deleted,
  // instead of failing the gluing condition on their dangling edges.
  bool cascade_annotations = false;
};

// Applies the rule at the given injective match following the double-pushout
// construction: elements of L \ l(K) are deleted, elements of R \ r(K) are
// created fresh, the K part keeps its host ids.
inline Outcome<Applied> apply_rule(const Rule& rule, const AGraph& host,
                                   const ElementMap& match,
                                   const ApplyOptions& opts = {}) {
  Report match_report = validate_element_map(rule.L.carrier, host.carrier, match);
  if (!match_report.empty())
    return Outcome<Applied>::failure("badMatch", "match is not a morphism: " +
                                                     describe(match_report));
  if (!is_injective(match))
    return Outcome<Applied>::failure("badMatch", "match is not injective");
  for (const auto& [x, y] : match)
    if (rule.L.flag(x) != host.flag(y))
      return Outcome<Applied>::failure("badMatch", "match changes an element role",
                                       {x, y});
  const AppCond* failing = nullptr;
  if (!application_conditions_hold(rule, host, match, &failing))
    return Outcome<Applied>::failure(
        "applicationCondition",
        failing && failing->positive ? "positive application condition has no extension"
                                     : "negative application condition matched");

  ElementSet l_image;
  for (const auto& [k, x] : rule.l) l_image.insert(x);
  ElementSet deleted;
  for (ElementId x : rule.L.carrier.elements())
    if (!l_image.count(x)) deleted.insert(match.at(x));

  Report log;
  if (opts.cascade_annotations) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const AnnPattern& p : all_ann_patterns(host)) {
        if (deleted.count(p.ann_node)) continue;
        if (deleted.count(p.target) || deleted.count(p.value)) {
          deleted.insert({p.ann_node, p.annotates_edge, p.with_edge});
          log.push_back({"annotationCascade",
                         "deleted orphaned annotation pattern of a deleted element",
                         {p.ann_node}});
          grew = true;
        }
      }
    }
  }

  // Gluing condition: no surviving edge or containment may reference a
  // deleted element.
  for (ElementId e : host.carrier.edges()) {
    if (deleted.count(e)) continue;
    if (deleted.count(host.carrier.src(e)) || deleted.count(host.carrier.tgt(e)))
      return Outcome<Applied>::failure("gluing", "dangling edge at deleted element",
                                       {e});
  }
  ElementMap match_inv = inverse(match);  // host image -> L (match injective)
  for (ElementId b : host.carrier.boxes()) {
    if (deleted.count(b)) continue;
    for (ElementId x : host.carrier.content(b)) {
      if (!deleted.count(x)) continue;
      // allowed only when the rule itself exhibits the containment pair
      auto bl = match_inv.find(b);
      auto xl = match_inv.find(x);
      bool in_rule = bl != match_inv.end() && xl != match_inv.end() &&
                     rule.L.carrier.contains(bl->second, xl->second);
      if (!in_rule)
        return Outcome<Applied>::failure(
            "gluing", "surviving box contains a deleted element", {b, x});
    }
  }

  Applied out;
  out.result = host;
  out.log = std::move(log);
  for (ElementId x : deleted) out.result.remove(x);

  // K part: comatch through the span; R \ r(K): fresh elements.
  for (const auto& [k, x] : rule.r) out.comatch[x] = match.at(rule.l.at(k));
  for (ElementId x : rule.R.carrier.nodes())
    if (!out.comatch.count(x))
      out.comatch[x] = out.result.add_node(rule.R.flag(x),
                                           rule.R.name(x) ? *rule.R.name(x) : "");
  for (ElementId x : rule.R.carrier.boxes())
    if (!out.comatch.count(x))
      out.comatch[x] = out.result.add_box(rule.R.flag(x),
                                          rule.R.name(x) ? *rule.R.name(x) : "");
  std::vector<ElementId> new_edges;
  for (ElementId e : rule.R.carrier.edges())
    if (!out.comatch.count(e)) {
      out.comatch[e] = out.result.add_edge(e, e, rule.R.flag(e),
                                           rule.R.name(e) ? *rule.R.name(e) : "");
      new_edges.push_back(e);
    }
  for (ElementId e : new_edges)
    out.result.carrier.set_endpoints(out.comatch.at(e),
                                     out.comatch.at(rule.R.carrier.src(e)),
                                     out.comatch.at(rule.R.carrier.tgt(e)));
  for (ElementId b : rule.R.carrier.boxes())
    for (ElementId x : rule.R.carrier.content(b))
      out.result.carrier.add_to_box_raw(out.comatch.at(b), out.comatch.at(x));
  out.result.carrier.close_containment();

  return Outcome<Applied>::success(std::move(out));
}

// Plain B-graph entry point.
inline Outcome<BGraph> apply_rule(const Rule& rule, const BGraph& host,
                                  const ElementMap& match) {
  auto applied = apply_rule(rule, as_annotated(host), match);
  if (!applied.ok()) return {std::nullopt, applied.issues};
  return Outcome<BGraph>::success(applied->result.carrier);
}

}  // namespace tyann
