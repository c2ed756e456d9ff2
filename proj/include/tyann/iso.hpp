#pragma once

#include <cstdio>

#include "tyann/agraph.hpp"

namespace tyann {

namespace detail {
inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}
inline std::uint64_t hash_str(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}
}  // namespace detail

// Canonical-form hash of an annotated graph: Weisfeiler-Lehman style label
// refinement over sorts, flags, names, adjacency and containment. Stable
// across element renumbering; used for reproducible trace audit lines.
inline std::string canonical_hash(const AGraph& g) {
  std::map<ElementId, std::uint64_t> label;
  for (ElementId x : g.carrier.elements()) {
    std::uint64_t h = detail::hash_mix(static_cast<std::uint64_t>(x.sort) + 11,
                                       static_cast<std::uint64_t>(g.flag(x)) + 97);
    if (const std::string* n = g.name(x)) h = detail::hash_mix(h, detail::hash_str(*n));
    label[x] = h;
  }
  for (int round = 0; round < 4; ++round) {
    std::map<ElementId, std::uint64_t> next = label;
    for (ElementId e : g.carrier.edges()) {
      if (!g.carrier.has_endpoints(e)) continue;
      ElementId s = g.carrier.src(e), t = g.carrier.tgt(e);
      if (label.count(s)) next[e] = detail::hash_mix(next[e], label.at(s) * 3);
      if (label.count(t)) next[e] = detail::hash_mix(next[e], label.at(t) * 7);
      if (label.count(s)) next[s] += label.at(e) * 13;
      if (label.count(t)) next[t] += label.at(e) * 17;
    }
    for (ElementId b : g.carrier.boxes())
      for (ElementId x : g.carrier.content(b)) {
        if (!label.count(x)) continue;
        next[b] += label.at(x) * 19;
        next[x] += label.at(b) * 23;
      }
    label = std::move(next);
  }
  std::uint64_t h = 0;
  std::vector<std::uint64_t> all;
  for (const auto& [x, v] : label) all.push_back(v);
  std::sort(all.begin(), all.end());
  for (std::uint64_t v : all) h = detail::hash_mix(h, v);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tyann
