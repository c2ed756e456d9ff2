#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tyann {

// Carrier sort of a graph element. Identifiers of different sorts never
// collide because the sort is part of the identifier.
enum class Sort : std::uint8_t { Node = 0, Edge = 1, Box = 2 };

inline const char* to_string(Sort s) {
  switch (s) {
    case Sort::Node: return "node";
    case Sort::Edge: return "edge";
    case Sort::Box: return "box";
  }
  return "?";
}

struct ElementId {
  Sort sort{Sort::Node};
  std::uint32_t value{0};

  auto operator<=>(const ElementId&) const = default;
};

inline std::string to_string(ElementId id) {
  return std::string(to_string(id.sort)) + ":" + std::to_string(id.value);
}

using ElementSet = std::set<ElementId>;
using ElementMap = std::map<ElementId, ElementId>;

// One validator finding. `code` names the violated invariant or constraint,
// `elements` the offending elements.
struct Violation {
  std::string code;
  std::string message;
  std::vector<ElementId> elements;
};

using Report = std::vector<Violation>;

inline std::string describe(const Report& report) {
  std::string out;
  for (const auto& v : report) {
    out += v.code;
    out += ": ";
    out += v.message;
    out += '\n';
  }
  return out;
}

// Result of an operation that can be refused. A missing value means the
// operation was rejected; `issues` carries the reasons (and warnings on
// success).
template <typename T>
struct Outcome {
  std::optional<T> value;
  Report issues;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }
  T* operator->() { return &*value; }

  static Outcome success(T v) { return {std::move(v), {}}; }
  static Outcome failure(std::string code, std::string message,
                         std::vector<ElementId> elems = {}) {
    Outcome o;
    o.issues.push_back({std::move(code), std::move(message), std::move(elems)});
    return o;
  }
};

}  // namespace tyann
