#pragma once

#include "tyann/iso.hpp"
#include "tyann/pattern.hpp"
#include "tyann/rewrite.hpp"

namespace tyann {

// A rule of the changeNodeType / changeEdgeType / changeBoxType schema: the
// K part holds the model elements and the type elements; L deletes the old
// annotation pattern and R creates the one targeting the new type.
struct TypeChangeRule {
  Rule rule;
  ElementId element;  // the retyped element, as an element of L
  Sort sort = Sort::Node;
  std::string from_type, to_type;
};

// Builds a node- or box-sort type change rule over types `from` and `to`.
inline TypeChangeRule make_type_change_rule(Sort sort, const std::string& from,
                                            const std::string& to) {
  TypeChangeRule out;
  out.sort = sort;
  out.from_type = from;
  out.to_type = to;
  Rule& r = out.rule;
  r.name = "change" + std::string(sort == Sort::Node ? "Node" : "Box") +
           "Type:" + from + ">" + to;

  AGraph& K = r.K;
  ElementId x = sort == Sort::Node ? K.add_node() : K.add_box();
  auto add_type = [&](AGraph& g, const std::string& n) {
    return sort == Sort::Node ? g.add_node(Flag::Type, n) : g.add_box(Flag::Type, n);
  };
  ElementId t_from = add_type(K, from);
  ElementId t_to = add_type(K, to);

  r.L = K;
  ElementId a = r.L.add_node(Flag::AnnNode);
  r.L.add_edge(a, x, Flag::AnnotatesEdge);
  r.L.add_edge(a, t_from, Flag::WithEdge);

  r.R = K;
  ElementId a2 = r.R.add_node(Flag::AnnNode);
  r.R.add_edge(a2, x, Flag::AnnotatesEdge);
  r.R.add_edge(a2, t_to, Flag::WithEdge);

  r.l = identity_map(K.carrier);
  r.r = identity_map(K.carrier);
  out.element = x;
  return out;
}

// Edge variant: K additionally holds the edge's endpoints.
inline TypeChangeRule make_edge_type_change_rule(const std::string& from,
                                                 const std::string& to) {
  TypeChangeRule out;
  out.sort = Sort::Edge;
  out.from_type = from;
  out.to_type = to;
  Rule& r = out.rule;
  r.name = "changeEdgeType:" + from + ">" + to;

  AGraph& K = r.K;
  ElementId s = K.add_node();
  ElementId t = K.add_node();
  ElementId x = K.add_edge(s, t);
  ElementId t_from = K.add_edge(s, t, Flag::Type, from);
  ElementId t_to = K.add_edge(s, t, Flag::Type, to);

  r.L = K;
  ElementId a = r.L.add_node(Flag::AnnNode);
  r.L.add_edge(a, x, Flag::AnnotatesEdge);
  r.L.add_edge(a, t_from, Flag::WithEdge);

  r.R = K;
  ElementId a2 = r.R.add_node(Flag::AnnNode);
  r.R.add_edge(a2, x, Flag::AnnotatesEdge);
  r.R.add_edge(a2, t_to, Flag::WithEdge);

  r.l = identity_map(K.carrier);
  r.r = identity_map(K.carrier);
  out.element = x;
  return out;
}

inline Report validate_type_change_rule(const TypeChangeRule& t) {
  Report report = validate_rule(t.rule);
  ElementSet l_image, r_image;
  for (const auto& [k, v] : t.rule.l) l_image.insert(v);
  for (const auto& [k, v] : t.rule.r) r_image.insert(v);
  auto side_patterns = [&](const AGraph& side, const ElementSet& keep) {
    std::vector<AnnPattern> out;
    for (const AnnPattern& p : all_ann_patterns(side))
      if (!keep.count(p.ann_node)) out.push_back(p);
    return out;
  };
  auto dels = side_patterns(t.rule.L, l_image);
  auto adds = side_patterns(t.rule.R, r_image);
  if (dels.size() != 1 || adds.size() != 1) {
    report.push_back({"typeChangeShape",
                      "L\\K and R\\K must each be exactly one annotation pattern",
                      {}});
    return report;
  }
  // the annotated element must coincide through the span, the types differ
  ElementMap l_inv = inverse(t.rule.l), r_inv = inverse(t.rule.r);
  if (!l_inv.count(dels[0].target) || !r_inv.count(adds[0].target) ||
      l_inv.at(dels[0].target) != r_inv.at(adds[0].target))
    report.push_back({"typeChangeShape", "annotates targets do not coincide", {}});
  const std::string* from = t.rule.L.name(dels[0].value);
  const std::string* to = t.rule.R.name(adds[0].value);
  if (from && to && *from == *to)
    report.push_back({"typeChangeShape", "old and new type coincide", {}});
  return report;
}

// ---------------------------------------------------------------------------
// Violation detection

enum class Cause { LostRequiredType, LostSoleWitness, PremiseNowHolds };

inline const char* to_string(Cause c) {
  switch (c) {
    case Cause::LostRequiredType: return "lost-required-type";
    case Cause::LostSoleWitness: return "lost-sole-witness";
    case Cause::PremiseNowHolds: return "premise-now-holds";
  }
  return "?";
}

struct DetectedViolation {
  std::size_t constraint_index = 0;
  int part_index = 0;
  Collection witness;  // premise collection in the post-change graph
  ConstraintForm form = ConstraintForm::Untyped;
  Cause cause = Cause::LostRequiredType;
};

// Applies the type change on a scratch copy and reports every constraint set
// that held before and fails afterwards, with the cause classified. Element
// ids survive the rewrite, so a violating premise collection absent from the
// pre-change collections is one the change itself brought about.
inline Outcome<std::vector<DetectedViolation>> detect_violations(
    const AGraph& before, const TypeChangeRule& tcr, const ElementMap& match,
    const std::vector<ConstraintSet>& constraints) {
  ApplyOptions opts;
  opts.cascade_annotations = true;
  auto applied = apply_rule(tcr.rule, before, match, opts);
  if (!applied.ok()) return {std::nullopt, applied.issues};
  const AGraph& after = applied->result;

  std::vector<DetectedViolation> out;
  for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
    if (!check_constraint_set(before, constraints[ci]).sat) continue;
    ConstraintVerdict v = check_constraint_set(after, constraints[ci]);
    if (v.sat) continue;
    const Constraint& part = constraints[ci].parts[v.failing_part];
    PatternSat pre = satisfies_pattern(before, part.premise);
    auto existed_before = [&](const Collection& w) {
      for (const Collection& old : pre.collections)
        if (old == w) return true;
      return false;
    };
    ConstraintForm form = classify_constraint_form(part);
    for (const Collection& w : v.violations) {
      DetectedViolation d;
      d.constraint_index = ci;
      d.part_index = v.failing_part;
      d.witness = w;
      d.form = form;
      if (!existed_before(w))
        d.cause = Cause::PremiseNowHolds;
      else
        d.cause = form == ConstraintForm::F2 ? Cause::LostSoleWitness
                                             : Cause::LostRequiredType;
      out.push_back(std::move(d));
    }
  }
  return Outcome<std::vector<DetectedViolation>>::success(std::move(out));
}

// ---------------------------------------------------------------------------
// The restricted-premise construction

// The part of a constraint premise that survives removing the elements
// connecting the distinguished element e to the rest of the pattern: the
// colimit of the maximal restricted occurrences, realized as their union
// inside the flattened premise (element ids are shared with it).
struct PBar {
  AGraph premise;                // flattened premise P
  std::vector<ElementMap> into;  // premise component graphs -> P
  ElementId element;             // the distinguished element e inside P
  AGraph graph;                  // restricted premise
  ElementMap embed;              // restricted premise -> P, identity on ids
};

inline Outcome<PBar> build_pbar(const Constraint& c,
                                std::pair<int, ElementId> element) {
  FlatPattern flat = flatten_pattern(c.premise);
  if (element.first < 0 || element.first >= static_cast<int>(flat.into.size()))
    return Outcome<PBar>::failure("badElement",
                                  "distinguished element is not in the premise");
  auto it = flat.into[element.first].find(element.second);
  if (it == flat.into[element.first].end())
    return Outcome<PBar>::failure("badElement",
                                  "distinguished element is not in the premise");
  PBar out;
  out.element = it->second;
  out.into = flat.into;
  out.premise = std::move(flat.graph);

  // connecting elements: plain edges incident to e, then every edge or
  // annotation pattern left dangling by their removal
  ElementSet removed;
  const BGraph& pc = out.premise.carrier;
  for (ElementId e : pc.edges()) {
    if (out.premise.flag(e) != Flag::PlainEdge) continue;
    if (pc.src(e) == out.element || pc.tgt(e) == out.element) removed.insert(e);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (ElementId e : pc.edges()) {
      if (removed.count(e)) continue;
      if (removed.count(pc.src(e)) || removed.count(pc.tgt(e))) {
        removed.insert(e);
        grew = true;
      }
    }
    for (const AnnPattern& p : all_ann_patterns(out.premise)) {
      if (removed.count(p.ann_node)) continue;
      if (removed.count(p.target) || removed.count(p.value)) {
        removed.insert({p.ann_node, p.annotates_edge, p.with_edge});
        grew = true;
      }
    }
  }
  ElementSet keep;
  for (ElementId x : pc.elements())
    if (!removed.count(x)) keep.insert(x);
  out.graph = subgraph(out.premise, keep);
  out.embed = identity_map(out.graph.carrier);
  return Outcome<PBar>::success(std::move(out));
}

// ---------------------------------------------------------------------------
// Repair synthesis

enum class RepairStrategy {
  ExtendRule,
  PostRepair,
  BlockNAC,
  CreateTypedElement,
  AddTypeAnnotation,
};

inline const char* to_string(RepairStrategy s) {
  switch (s) {
    case RepairStrategy::ExtendRule: return "extendRule";
    case RepairStrategy::PostRepair: return "postRepair";
    case RepairStrategy::BlockNAC: return "blockNAC";
    case RepairStrategy::CreateTypedElement: return "createTypedElement";
    case RepairStrategy::AddTypeAnnotation: return "addTypeAnnotation";
  }
  return "?";
}

struct RepairOption {
  RepairStrategy strategy;
  Rule rule;  // repair rule, or the whole extended / NAC-guarded rule
  // L elements bound through a violation witness: L element ->
  // (premise graph index, premise element)
  std::map<ElementId, std::pair<int, ElementId>> binding;
};

struct RepairPlan {
  std::string constraint_name;
  std::vector<RepairOption> options;  // feasibility order, best first
  Cause cause = Cause::LostRequiredType;
};

// Result of folding a constraint premise into a type change rule.
struct ExtendedRule {
  TypeChangeRule tcr;
  ElementMap old_l;  // previous L -> extended L
};

// Extends a type change rule with an F1 premise: L gains the whole premise
// glued at e, K and R gain only the restricted premise, so the elements
// connecting e to the pattern are deleted concurrently with the type change.
inline Outcome<ExtendedRule> synthesize_extend_rule(const TypeChangeRule& tcr,
                                                    const Constraint& c,
                                                    const PBar& pbar) {
  const Rule& r0 = tcr.rule;
  ElementMap l_inv = inverse(r0.l);
  if (!l_inv.count(tcr.element))
    return Outcome<ExtendedRule>::failure("gluePoint",
                                          "retyped element is not preserved");
  ElementId e_K = l_inv.at(tcr.element);
  ElementId e_R = r0.r.at(e_K);

  Coproduct newL = glue(r0.L, pbar.premise, {{pbar.element, tcr.element}});
  Coproduct newK = glue(r0.K, pbar.graph, {{pbar.element, e_K}});
  Coproduct newR = glue(r0.R, pbar.graph, {{pbar.element, e_R}});

  ExtendedRule out;
  out.tcr = tcr;
  out.old_l = newL.in1;
  Rule& rule = out.tcr.rule;
  rule.name = r0.name + "+" + c.name;
  rule.L = std::move(newL.graph);
  rule.K = std::move(newK.graph);
  rule.R = std::move(newR.graph);
  rule.l.clear();
  rule.r.clear();
  for (const auto& [k, x] : r0.l) rule.l[newK.in1.at(k)] = newL.in1.at(x);
  for (const auto& [k, x] : r0.r) rule.r[newK.in1.at(k)] = newR.in1.at(x);
  for (ElementId p : pbar.graph.carrier.elements()) {
    if (p == pbar.element) continue;  // already covered through K
    rule.l[newK.in2.at(p)] = newL.in2.at(p);
    rule.r[newK.in2.at(p)] = newR.in2.at(p);
  }
  rule.acs.clear();
  for (const AppCond& ac : r0.acs) {
    AppCond moved = ac;
    ElementMap embed;
    for (const auto& [x, y] : ac.embed) embed[newL.in1.at(x)] = y;
    moved.embed = std::move(embed);
    rule.acs.push_back(std::move(moved));
  }
  out.tcr.element = newL.in1.at(tcr.element);
  return Outcome<ExtendedRule>::success(std::move(out));
}

// Post-hoc repair for an F1 constraint: deletes the connection of the
// retyped element with the premise pattern. L is the flat premise, bound
// fully through the violation witness.
inline Outcome<RepairOption> synthesize_post_repair(const Constraint& c,
                                                    const PBar& pbar) {
  RepairOption out;
  out.strategy = RepairStrategy::PostRepair;
  out.rule.name = "repair:" + c.name;
  out.rule.L = pbar.premise;
  out.rule.K = pbar.graph;
  out.rule.R = pbar.graph;
  out.rule.l = pbar.embed;
  out.rule.r = identity_map(pbar.graph.carrier);
  for (std::size_t i = 0; i < pbar.into.size(); ++i)
    for (const auto& [x, fx] : pbar.into[i])
      out.binding[fx] = {static_cast<int>(i), x};
  return Outcome<RepairOption>::success(std::move(out));
}

namespace detail {

// Flattened premise -> flattened conclusion view of a constraint.
struct FlatConstraint {
  FlatPattern premise, conclusion;
  ElementMap embed;  // premise flat -> conclusion flat
};

inline FlatConstraint flatten_constraint(const Constraint& c) {
  FlatConstraint out;
  out.premise = flatten_pattern(c.premise);
  out.conclusion = flatten_pattern(c.conclusion);
  for (const auto& [i, j] : c.morph.graph_map) {
    auto it = c.morph.embed.find(i);
    if (it == c.morph.embed.end()) continue;
    for (const auto& [x, y] : it->second)
      out.embed[out.premise.into[i].at(x)] = out.conclusion.into[j].at(y);
  }
  return out;
}

// Annotation patterns of the flat conclusion that are not premise images.
inline std::vector<AnnPattern> new_type_patterns(const FlatConstraint& fc) {
  ElementSet image;
  for (const auto& [x, y] : fc.embed) image.insert(y);
  std::vector<AnnPattern> out;
  for (const AnnPattern& p : all_ann_patterns(fc.conclusion.graph)) {
    Flag vf = fc.conclusion.graph.flag(p.value);
    if (vf != Flag::Type && vf != Flag::BundleBox) continue;
    if (!image.count(p.ann_node)) out.push_back(p);
  }
  return out;
}

// Witness binding of the premise-image part of an L built from the flat
// conclusion.
inline std::map<ElementId, std::pair<int, ElementId>> conclusion_binding(
    const FlatConstraint& fc, const AGraph& L) {
  std::map<ElementId, std::pair<int, ElementId>> out;
  for (std::size_t i = 0; i < fc.premise.into.size(); ++i)
    for (const auto& [x, fx] : fc.premise.into[i]) {
      auto it = fc.embed.find(fx);
      if (it != fc.embed.end() && L.carrier.has(it->second))
        out[it->second] = {static_cast<int>(i), x};
    }
  return out;
}

inline std::map<ElementId, std::pair<int, ElementId>> premise_binding(
    const FlatPattern& premise) {
  std::map<ElementId, std::pair<int, ElementId>> out;
  for (std::size_t i = 0; i < premise.into.size(); ++i)
    for (const auto& [x, fx] : premise.into[i]) out[fx] = {static_cast<int>(i), x};
  return out;
}

}  // namespace detail

// Repair plan for an F2 constraint. Options in feasibility order: annotate
// an existing candidate element, create a fresh correctly typed element, or
// (for lost-sole-witness only) block the type change with a negative
// application condition.
inline Outcome<RepairPlan> handle_form2(const TypeChangeRule& tcr,
                                        const Constraint& c, Cause cause) {
  detail::FlatConstraint fc = detail::flatten_constraint(c);

  RepairPlan plan;
  plan.constraint_name = c.name;
  plan.cause = cause;

  // addTypeAnnotation: L is the conclusion without the fresh annotation
  // machinery, so applying only adds the missing annotation pattern.
  {
    auto fresh = detail::new_type_patterns(fc);
    if (fresh.size() == 1) {
      ElementSet keep;
      for (ElementId x : fc.conclusion.graph.carrier.elements())
        if (x != fresh[0].ann_node && x != fresh[0].annotates_edge &&
            x != fresh[0].with_edge)
          keep.insert(x);
      RepairOption opt;
      opt.strategy = RepairStrategy::AddTypeAnnotation;
      opt.rule.name = "repair-annotate:" + c.name;
      opt.rule.L = subgraph(fc.conclusion.graph, keep);
      opt.rule.K = opt.rule.L;
      opt.rule.R = fc.conclusion.graph;
      opt.rule.l = identity_map(opt.rule.K.carrier);
      opt.rule.r = identity_map(opt.rule.K.carrier);
      opt.binding = detail::conclusion_binding(fc, opt.rule.L);
      plan.options.push_back(std::move(opt));
    }
  }

  // createTypedElement: the premise rewritten into the whole conclusion.
  {
    RepairOption opt;
    opt.strategy = RepairStrategy::CreateTypedElement;
    opt.rule.name = "repair-create:" + c.name;
    opt.rule.L = fc.premise.graph;
    opt.rule.K = fc.premise.graph;
    opt.rule.R = fc.conclusion.graph;
    opt.rule.l = identity_map(fc.premise.graph.carrier);
    opt.rule.r = fc.embed;
    opt.binding = detail::premise_binding(fc.premise);
    plan.options.push_back(std::move(opt));
  }

  if (cause == Cause::LostSoleWitness) {
    // blockNAC: refuse the type change while a premise occurrence exists
    RepairOption opt;
    opt.strategy = RepairStrategy::BlockNAC;
    opt.rule = tcr.rule;
    Coproduct ac = glue(tcr.rule.L, fc.premise.graph, {});
    AppCond nac;
    nac.positive = false;
    nac.ac = std::move(ac.graph);
    nac.embed = ac.in1;
    opt.rule.acs.push_back(std::move(nac));
    plan.options.push_back(std::move(opt));
  }
  return Outcome<RepairPlan>::success(std::move(plan));
}

// Repair plan for an F3 constraint: add the mandated structure, either as a
// post-hoc repair rule or (for the minimal typed-element premise) folded
// into the rule's R part.
inline Outcome<RepairPlan> handle_form3(const TypeChangeRule& tcr,
                                        const Constraint& c) {
  detail::FlatConstraint fc = detail::flatten_constraint(c);
  RepairPlan plan;
  plan.constraint_name = c.name;
  plan.cause = Cause::PremiseNowHolds;

  // postRepair: the premise rewritten into the conclusion
  {
    RepairOption opt;
    opt.strategy = RepairStrategy::PostRepair;
    opt.rule.name = "repair-extend:" + c.name;
    opt.rule.L = fc.premise.graph;
    opt.rule.K = fc.premise.graph;
    opt.rule.R = fc.conclusion.graph;
    opt.rule.l = identity_map(fc.premise.graph.carrier);
    opt.rule.r = fc.embed;
    opt.binding = detail::premise_binding(fc.premise);
    plan.options.push_back(std::move(opt));
  }

  // extendRule: only when the premise is exactly one typed element, which
  // can be located inside R next to the freshly created annotation
  const AGraph& P = fc.premise.graph;
  auto pats = all_ann_patterns(P);
  if (pats.size() == 1 && P.carrier.size() == 5) {
    const AnnPattern& pp = pats[0];
    const std::string* tname = P.name(pp.value);
    ElementMap l_inv = inverse(tcr.rule.l);
    if (tname && l_inv.count(tcr.element)) {
      ElementId e_R = tcr.rule.r.at(l_inv.at(tcr.element));
      for (const AnnPattern& ra : annotations_of(tcr.rule.R, e_R)) {
        const std::string* rt = tcr.rule.R.name(ra.value);
        if (!rt || *rt != *tname) continue;
        ElementMap identify;  // premise elements -> R elements
        identify[pp.target] = e_R;
        identify[pp.ann_node] = ra.ann_node;
        identify[pp.annotates_edge] = ra.annotates_edge;
        identify[pp.with_edge] = ra.with_edge;
        identify[pp.value] = ra.value;
        ElementMap conc_identify;  // conclusion elements -> R elements
        for (const auto& [px, rx] : identify) conc_identify[fc.embed.at(px)] = rx;
        Coproduct newR = glue(tcr.rule.R, fc.conclusion.graph, conc_identify);
        RepairOption opt;
        opt.strategy = RepairStrategy::ExtendRule;
        opt.rule = tcr.rule;
        opt.rule.name = tcr.rule.name + "+" + c.name;
        opt.rule.R = std::move(newR.graph);
        opt.rule.r.clear();
        for (const auto& [k, x] : tcr.rule.r) opt.rule.r[k] = newR.in1.at(x);
        plan.options.push_back(std::move(opt));
        break;
      }
    }
  }
  return Outcome<RepairPlan>::success(std::move(plan));
}

// ---------------------------------------------------------------------------
// Cascade execution

enum class RepairPolicy { Extend, Post };

inline const char* to_string(RepairPolicy p) {
  return p == RepairPolicy::Extend ? "extend" : "post";
}

struct TraceEntry {
  int round = 0;  // 0 is the type change application itself
  std::string action;
  std::string constraint;
  std::string strategy;
  std::string graph_hash;
};

struct AdaptResult {
  AGraph graph;
  bool converged = false;
  int rounds = 0;  // repair rounds executed
  std::vector<TraceEntry> trace;
  std::vector<std::string> residual;  // constraint sets still violated
};

namespace detail {

// Applies a repair rule with its L part pinned through a violation witness.
// Returns false when no pinned match remains or the rewrite is refused.
inline bool run_repair(AGraph& g, const RepairOption& opt,
                       const Collection& witness) {
  MatchOptions mo;
  mo.injective = true;
  for (const auto& [lx, src] : opt.binding) {
    auto [gi, px] = src;
    if (gi < 0 || gi >= static_cast<int>(witness.size())) return false;
    auto it = witness[gi].find(px);
    if (it == witness[gi].end()) return false;
    mo.pinned[lx] = it->second;
  }
  auto ms = enumerate_matches(opt.rule.L, g, mo);
  if (ms.empty()) return false;
  ApplyOptions ao;
  ao.cascade_annotations = true;
  auto applied = apply_rule(opt.rule, g, ms.front(), ao);
  if (!applied.ok()) return false;
  g = std::move(applied->result);
  return true;
}

}  // namespace detail

// Applies a type change rule and keeps the constraint sets satisfied: under
// the extend policy F1 premises (and minimal F3 conclusions) are folded into
// the rule before it runs; remaining violations are handled by synthesized
// post-hoc repair rules, iterated until convergence or until `max_cascade`
// repair rounds were spent. An exhausted budget is reported as an
// unconverged result, not an error.
inline Outcome<AdaptResult> apply_with_repairs(
    const AGraph& g, const TypeChangeRule& tcr_in, const ElementMap& match_in,
    const std::vector<ConstraintSet>& constraints, RepairPolicy policy,
    int max_cascade = 8) {
  TypeChangeRule tcr = tcr_in;
  ElementMap match = match_in;

  auto detected = detect_violations(g, tcr, match, constraints);
  if (!detected.ok()) return {std::nullopt, detected.issues};

  AdaptResult out;
  bool extended = false;

  if (policy == RepairPolicy::Extend) {
    std::set<std::pair<std::size_t, int>> folded;
    for (const DetectedViolation& d : *detected) {
      if (!folded.insert({d.constraint_index, d.part_index}).second) continue;
      const Constraint& part =
          constraints[d.constraint_index].parts[d.part_index];
      if (d.form == ConstraintForm::F1 && d.cause == Cause::LostRequiredType) {
        auto e = distinguished_element(part);
        if (!e) continue;
        auto pbar = build_pbar(part, *e);
        if (!pbar.ok()) return {std::nullopt, pbar.issues};
        auto ext = synthesize_extend_rule(tcr, part, *pbar);
        if (!ext.ok()) return {std::nullopt, ext.issues};
        // re-route the match: pin the old L part, search the premise part
        MatchOptions mo;
        mo.injective = true;
        for (const auto& [x, y] : match) mo.pinned[ext->old_l.at(x)] = y;
        auto ms = enumerate_matches(ext->tcr.rule.L, g, mo);
        if (ms.empty()) continue;  // premise does not touch this occurrence
        tcr = std::move(ext->tcr);
        match = std::move(ms.front());
        extended = true;
      } else if (d.form == ConstraintForm::F3 &&
                 d.cause == Cause::PremiseNowHolds) {
        auto plan = handle_form3(tcr, part);
        if (!plan.ok()) return {std::nullopt, plan.issues};
        for (const RepairOption& opt : plan->options) {
          if (opt.strategy != RepairStrategy::ExtendRule) continue;
          tcr.rule = opt.rule;  // only R changed, the match stays valid
          extended = true;
          break;
        }
      }
    }
  }

  ApplyOptions ao;
  ao.cascade_annotations = true;
  auto applied = apply_rule(tcr.rule, g, match, ao);
  if (!applied.ok()) return {std::nullopt, applied.issues};
  out.graph = std::move(applied->result);
  out.trace.push_back({0, "apply", tcr.rule.name,
                       extended ? to_string(RepairStrategy::ExtendRule) : "",
                       canonical_hash(out.graph)});

  for (int round = 1; round <= max_cascade; ++round) {
    std::vector<std::tuple<std::size_t, int, std::vector<Collection>>> open;
    for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
      ConstraintVerdict v = check_constraint_set(out.graph, constraints[ci]);
      if (!v.sat) open.push_back({ci, v.failing_part, v.violations});
    }
    if (open.empty()) {
      out.converged = true;
      break;
    }
    out.rounds = round;

    bool progressed = false;
    for (const auto& [ci, pi, witnesses] : open) {
      const Constraint& part = constraints[ci].parts[pi];
      ConstraintForm form = classify_constraint_form(part);
      for (const Collection& w : witnesses) {
        bool done = false;
        switch (form) {
          case ConstraintForm::F1: {
            auto e = distinguished_element(part);
            if (!e) break;
            auto pbar = build_pbar(part, *e);
            if (!pbar.ok()) break;
            auto opt = synthesize_post_repair(part, *pbar);
            if (!opt.ok()) break;
            done = detail::run_repair(out.graph, *opt, w);
            if (done)
              out.trace.push_back({round, "repair", constraints[ci].name,
                                   to_string(opt->strategy),
                                   canonical_hash(out.graph)});
            break;
          }
          case ConstraintForm::F2: {
            auto plan = handle_form2(tcr, part, Cause::LostSoleWitness);
            if (!plan.ok()) break;
            for (const RepairOption& opt : plan->options) {
              // a NAC cannot be imposed after the fact
              if (opt.strategy == RepairStrategy::BlockNAC) continue;
              if (detail::run_repair(out.graph, opt, w)) {
                out.trace.push_back({round, "repair", constraints[ci].name,
                                     to_string(opt.strategy),
                                     canonical_hash(out.graph)});
                done = true;
                break;
              }
            }
            break;
          }
          case ConstraintForm::F3: {
            auto plan = handle_form3(tcr, part);
            if (!plan.ok()) break;
            for (const RepairOption& opt : plan->options) {
              if (opt.strategy != RepairStrategy::PostRepair) continue;
              if (detail::run_repair(out.graph, opt, w)) {
                out.trace.push_back({round, "repair", constraints[ci].name,
                                     to_string(opt.strategy),
                                     canonical_hash(out.graph)});
                done = true;
              }
              break;
            }
            break;
          }
          default:
            break;  // untyped and ambiguous constraints have no repair schema
        }
        progressed = progressed || done;
      }
    }
    if (!progressed) break;  // no applicable repair, stop early
  }

  if (!out.converged) {
    for (const ConstraintSet& cs : constraints)
      if (!check_constraint_set(out.graph, cs).sat) out.residual.push_back(cs.name);
    out.converged = out.residual.empty();
  }
  return Outcome<AdaptResult>::success(std::move(out));
}

}  // namespace tyann
