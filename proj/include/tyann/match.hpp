#pragma once

#include <functional>

#include "tyann/agraph.hpp"

namespace tyann {

struct MatchOptions {
  bool injective = true;
  bool surjective = false;       // only useful together with injective
  ElementMap pinned;             // pattern element -> forced host element
  std::function<bool(ElementId, ElementId)> compatible;  // extra filter
};

namespace detail {

class Matcher {
 public:
  Matcher(const BGraph& pattern, const BGraph& host, const MatchOptions& opt)
      : pat_(pattern), host_(host), opt_(opt), order_(pattern.elements()) {}

  std::vector<ElementMap> run() {
    assignment_.clear();
    used_.clear();
    results_.clear();
    for (const auto& [x, y] : opt_.pinned) {
      if (!admissible(x, y)) return {};
      assign(x, y);
    }
    extend(0);
    return std::move(results_);
  }

 private:
  bool admissible(ElementId x, ElementId y) const {
    if (x.sort != y.sort || !host_.has(y)) return false;
    if (opt_.injective && used_.count(y)) return false;
    if (opt_.compatible && !opt_.compatible(x, y)) return false;
    // endpoint commutation for every pattern edge whose parts are decided
    auto img = [&](ElementId z) -> std::optional<ElementId> {
      if (z == x) return y;
      auto it = assignment_.find(z);
      if (it == assignment_.end()) return std::nullopt;
      return it->second;
    };
    for (ElementId e : pat_.edges()) {
      if (!pat_.has_endpoints(e)) continue;
      auto me = img(e);
      if (!me) continue;
      if (!host_.has_endpoints(*me)) return false;
      if (auto ms = img(pat_.src(e)); ms && host_.src(*me) != *ms) return false;
      if (auto mt = img(pat_.tgt(e)); mt && host_.tgt(*me) != *mt) return false;
    }
    for (ElementId b : pat_.boxes()) {
      auto mb = img(b);
      if (!mb) continue;
      for (ElementId c : pat_.content(b)) {
        auto mc = img(c);
        if (mc && !host_.contains(*mb, *mc)) return false;
      }
    }
    return true;
  }

  void assign(ElementId x, ElementId y) {
    assignment_[x] = y;
    used_.insert(y);
  }

  void unassign(ElementId x, ElementId y) {
    assignment_.erase(x);
    auto it = used_.find(y);
    if (it != used_.end()) used_.erase(it);
  }

  void extend(std::size_t idx) {
    while (idx < order_.size() && assignment_.count(order_[idx])) ++idx;
    if (idx == order_.size()) {
      if (opt_.surjective && used_.size() != host_.size()) return;
      results_.push_back(assignment_);
      return;
    }
    ElementId x = order_[idx];
    for (ElementId y : host_.sort_set(x.sort)) {
      if (!admissible(x, y)) continue;
      assign(x, y);
      extend(idx + 1);
      unassign(x, y);
    }
  }

  const BGraph& pat_;
  const BGraph& host_;
  const MatchOptions& opt_;
  std::vector<ElementId> order_;
  ElementMap assignment_;
  std::multiset<ElementId> used_;
  std::vector<ElementMap> results_;
};

}  // namespace detail

// Enumerates morphisms pattern -> host. Order is deterministic: lexicographic
// by the image sequence over sorted pattern elements.
inline std::vector<ElementMap> enumerate_matches(const BGraph& pattern,
                                                 const BGraph& host,
                                                 const MatchOptions& opt = {}) {
  return detail::Matcher(pattern, host, opt).run();
}

inline std::vector<GraphMorphism> find_matches(const BGraph& pattern,
                                               const BGraph& host,
                                               bool injective = true) {
  MatchOptions opt;
  opt.injective = injective;
  std::vector<GraphMorphism> out;
  for (auto& m : enumerate_matches(pattern, host, opt))
    out.push_back({pattern, host, std::move(m)});
  return out;
}

// Compatibility for annotated graphs: role flags must agree, and a named
// pattern element only matches a host element with the same name. Unnamed
// pattern elements act as wildcards.
inline std::function<bool(ElementId, ElementId)> flag_name_compat(
    const AGraph& pattern, const AGraph& host) {
  return [&pattern, &host](ElementId x, ElementId y) {
    if (pattern.flag(x) != host.flag(y)) return false;
    const std::string* n = pattern.name(x);
    if (!n) return true;
    const std::string* m = host.name(y);
    return m && *m == *n;
  };
}

inline std::vector<ElementMap> enumerate_matches(const AGraph& pattern,
                                                 const AGraph& host,
                                                 MatchOptions opt = {}) {
  auto inner = std::move(opt.compatible);
  auto compat = flag_name_compat(pattern, host);
  opt.compatible = inner ? [inner, compat](ElementId x, ElementId y) {
    return compat(x, y) && inner(x, y);
  } : compat;
  return enumerate_matches(pattern.carrier, host.carrier, opt);
}

inline bool isomorphic(const BGraph& a, const BGraph& b,
                       const std::function<bool(ElementId, ElementId)>& compat = {}) {
  if (a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size() ||
      a.boxes().size() != b.boxes().size())
    return false;
  MatchOptions opt;
  opt.injective = true;
  opt.surjective = true;
  opt.compatible = compat;
  for (const auto& m : enumerate_matches(a, b, opt)) {
    if (validate_element_map(b, a, inverse(m)).empty()) return true;
  }
  return false;
}

// Isomorphism of annotated graphs: carrier isomorphism matching flags and
// names exactly (including name absence).
inline bool isomorphic(const AGraph& a, const AGraph& b) {
  auto compat = [&](ElementId x, ElementId y) {
    if (a.flag(x) != b.flag(y)) return false;
    const std::string* n = a.name(x);
    const std::string* m = b.name(y);
    if (!n && !m) return true;
    return n && m && *n == *m;
  };
  return isomorphic(a.carrier, b.carrier, compat);
}

}  // namespace tyann
