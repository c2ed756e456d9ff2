// Command-line driver: loads artifacts from JSON files and runs the library
// pipelines. Exit codes: 0 success, 1 check failure, 2 input error.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "tyann/tyann.hpp"

namespace {

using tyann::json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

json report_of(const tyann::Report& r) {
  json out = json::array();
  for (const auto& v : r) {
    json j = json::object();
    j["code"] = v.code;
    j["message"] = v.message;
    json els = json::array();
    for (tyann::ElementId x : v.elements) els.push_back(tyann::to_string(x));
    j["elements"] = els;
    out.push_back(j);
  }
  return out;
}

void emit(const json& j) { std::cout << tyann::canonical_dump(j); }

int input_error(const std::string& what, const tyann::Report& issues) {
  json j = json::object();
  j["error"] = what;
  j["issues"] = report_of(issues);
  emit(j);
  return kInputError;
}

// Accepts a path with or without the .json suffix.
std::string resolve(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path) && fs::exists(path + ".json")) return path + ".json";
  return path;
}

struct Loaded {
  tyann::Workspace ws;
  std::vector<std::string> names;  // registration order
};

std::optional<Loaded> load_all(const std::vector<std::string>& paths,
                               int& exit_code) {
  Loaded out;
  for (const std::string& p : paths) {
    auto name = out.ws.load_file(resolve(p));
    if (!name.ok()) {
      exit_code = input_error("cannot load " + p, name.issues);
      return std::nullopt;
    }
    out.names.push_back(*name);
  }
  return out;
}

const tyann::GraphDoc* find_graph(const tyann::Workspace& ws, const std::string& n) {
  auto it = ws.graphs.find(n);
  return it == ws.graphs.end() ? nullptr : &it->second;
}

json map_json(const tyann::ElementMap& m) {
  json j = json::object();
  for (const auto& [x, y] : m) j[tyann::to_string(x)] = tyann::to_string(y);
  return j;
}

int cmd_validate(const std::string& path) {
  int rc = 0;
  auto loaded = load_all({path}, rc);
  if (!loaded) return rc;
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[0]);
  if (!g) return input_error(path + " is not a graph", {});
  tyann::Report r = tyann::validate_bgraph(g->graph.carrier);
  tyann::Report wf = tyann::check_well_formed(g->graph);
  r.insert(r.end(), wf.begin(), wf.end());
  json j = json::object();
  j["graph"] = loaded->names[0];
  j["valid"] = r.empty();
  j["violations"] = report_of(r);
  emit(j);
  return r.empty() ? kOk : kCheckFailed;
}

int cmd_check(const std::string& graph_path,
              const std::vector<std::string>& constraint_paths) {
  int rc = 0;
  std::vector<std::string> all{graph_path};
  all.insert(all.end(), constraint_paths.begin(), constraint_paths.end());
  auto loaded = load_all(all, rc);
  if (!loaded) return rc;
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[0]);
  if (!g) return input_error(graph_path + " is not a graph", {});
  json results = json::array();
  bool all_ok = true;
  for (std::size_t i = 1; i < loaded->names.size(); ++i) {
    auto it = loaded->ws.constraints.find(loaded->names[i]);
    if (it == loaded->ws.constraints.end())
      return input_error(all[i] + " is not a constraint", {});
    tyann::ConstraintVerdict v = tyann::check_constraint_set(g->graph, it->second.set);
    json r = json::object();
    r["constraint"] = it->second.set.name;
    r["satisfied"] = v.sat;
    if (!v.sat) {
      r["failingPart"] = v.failing_part;
      r["violationCount"] = v.violations.size();
    }
    results.push_back(r);
    all_ok = all_ok && v.sat;
  }
  json j = json::object();
  j["graph"] = loaded->names[0];
  j["results"] = results;
  emit(j);
  return all_ok ? kOk : kCheckFailed;
}

int cmd_match(const std::string& pattern_path, const std::string& graph_path) {
  auto pj = tyann::read_json_file(resolve(pattern_path));
  if (!pj.ok()) return input_error("cannot load " + pattern_path, pj.issues);
  auto pat = tyann::pattern_from_json(*pj);
  if (!pat.ok()) return input_error(pattern_path + " is not a pattern", pat.issues);
  int rc = 0;
  auto loaded = load_all({graph_path}, rc);
  if (!loaded) return rc;
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[0]);
  if (!g) return input_error(graph_path + " is not a graph", {});
  tyann::PatternSat s = tyann::satisfies_pattern(g->graph, pat->pattern);
  json j = json::object();
  j["satisfied"] = s.sat;
  j["collections"] = json::array();
  for (const tyann::Collection& c : s.collections) {
    json col = json::array();
    for (const tyann::ElementMap& m : c) col.push_back(map_json(m));
    j["collections"].push_back(col);
  }
  emit(j);
  return s.sat ? kOk : kCheckFailed;
}

int cmd_apply(const std::string& rule_path, const std::string& graph_path,
              int match_index, const std::string& out_path) {
  int rc = 0;
  auto loaded = load_all({rule_path, graph_path}, rc);
  if (!loaded) return rc;
  auto rit = loaded->ws.rules.find(loaded->names[0]);
  if (rit == loaded->ws.rules.end())
    return input_error(rule_path + " is not a rule", {});
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[1]);
  if (!g) return input_error(graph_path + " is not a graph", {});

  tyann::MatchOptions mo;
  mo.injective = true;
  mo.compatible = tyann::flag_name_compat(rit->second.rule.L, g->graph);
  auto matches = tyann::enumerate_matches(rit->second.rule.L.carrier,
                                          g->graph.carrier, mo);
  json j = json::object();
  j["rule"] = rit->second.rule.name;
  j["matchCount"] = matches.size();
  if (match_index < 0 || match_index >= static_cast<int>(matches.size())) {
    j["error"] = "no match at the requested index";
    emit(j);
    return kCheckFailed;
  }
  auto applied = tyann::apply_rule(rit->second.rule, g->graph, matches[match_index]);
  if (!applied.ok()) {
    j["error"] = "rule not applicable";
    j["issues"] = report_of(applied.issues);
    emit(j);
    return kCheckFailed;
  }
  tyann::GraphDoc out = tyann::as_doc(applied->result, loaded->names[1]);
  j["result"] = tyann::to_json(out);
  if (!out_path.empty()) tyann::write_json_file(out_path, tyann::to_json(out));
  emit(j);
  return kOk;
}

int cmd_typeann(const std::string& typed_path, const std::string& out_path) {
  int rc = 0;
  auto loaded = load_all({typed_path}, rc);
  if (!loaded) return rc;
  auto it = loaded->ws.typed.find(loaded->names[0]);
  if (it == loaded->ws.typed.end())
    return input_error(typed_path + " is not a typed graph", {});
  auto img = tyann::type_ann_ob(it->second.typed);
  if (!img.ok()) return input_error("construction rejected the input", img.issues);
  tyann::GraphDoc out = tyann::as_doc(img->h, loaded->names[0] + "-annotated");
  json j = json::object();
  j["wellFormed"] = tyann::check_well_formed(img->h).empty();
  j["result"] = tyann::to_json(out);
  if (!out_path.empty()) tyann::write_json_file(out_path, tyann::to_json(out));
  emit(j);
  return kOk;
}

int cmd_extract(const std::string& graph_path) {
  int rc = 0;
  auto loaded = load_all({graph_path}, rc);
  if (!loaded) return rc;
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[0]);
  if (!g) return input_error(graph_path + " is not a graph", {});
  auto extracted = tyann::extract_typed(g->graph);
  if (!extracted.ok()) {
    json j = json::object();
    j["error"] = "graph is not well formed";
    j["issues"] = report_of(extracted.issues);
    emit(j);
    return kCheckFailed;
  }
  json j = json::object();
  j["count"] = extracted->size();
  j["typedGraphs"] = json::array();
  for (const tyann::TypedGraph& t : *extracted)
    j["typedGraphs"].push_back(tyann::to_json(tyann::as_doc(t)));
  emit(j);
  return kOk;
}

int cmd_triple_check(const std::string& typed_path) {
  int rc = 0;
  auto loaded = load_all({typed_path}, rc);
  if (!loaded) return rc;
  auto it = loaded->ws.typed.find(loaded->names[0]);
  if (it == loaded->ws.typed.end())
    return input_error(typed_path + " is not a typed graph", {});
  auto img = tyann::type_ann_ob(it->second.typed);
  if (!img.ok()) return input_error("construction rejected the input", img.issues);
  auto corr = tyann::build_correspondences(it->second.typed, *img);
  if (!corr.ok()) return input_error("correspondence construction failed", corr.issues);
  tyann::TripleVerdict v =
      tyann::satisfies_ann_type_patterns(it->second.typed, *img, *corr);
  json j = json::object();
  j["satisfied"] = v.ok;
  j["witnessCount"] = v.witnesses.size();
  if (v.failing) j["failingElement"] = tyann::to_string(*v.failing);
  emit(j);
  return v.ok ? kOk : kCheckFailed;
}

int cmd_adapt(const std::string& rule_path, const std::string& graph_path,
              const std::vector<std::string>& constraint_paths,
              const std::string& policy, int max_cascade,
              const std::string& out_path) {
  int rc = 0;
  std::vector<std::string> all{rule_path, graph_path};
  all.insert(all.end(), constraint_paths.begin(), constraint_paths.end());
  auto loaded = load_all(all, rc);
  if (!loaded) return rc;
  auto rit = loaded->ws.rules.find(loaded->names[0]);
  if (rit == loaded->ws.rules.end())
    return input_error(rule_path + " is not a rule", {});
  if (!rit->second.type_change)
    return input_error(rule_path + " carries no typeChange section", {});
  const tyann::GraphDoc* g = find_graph(loaded->ws, loaded->names[1]);
  if (!g) return input_error(graph_path + " is not a graph", {});
  std::vector<tyann::ConstraintSet> constraints;
  for (std::size_t i = 2; i < loaded->names.size(); ++i) {
    auto it = loaded->ws.constraints.find(loaded->names[i]);
    if (it == loaded->ws.constraints.end())
      return input_error(all[i] + " is not a constraint", {});
    constraints.push_back(it->second.set);
  }

  const tyann::TypeChangeRule& tcr = *rit->second.type_change;
  tyann::MatchOptions mo;
  mo.injective = true;
  mo.compatible = tyann::flag_name_compat(tcr.rule.L, g->graph);
  auto matches = tyann::enumerate_matches(tcr.rule.L.carrier, g->graph.carrier, mo);
  if (matches.empty()) {
    json j = json::object();
    j["error"] = "type change rule has no match";
    emit(j);
    return kCheckFailed;
  }
  tyann::RepairPolicy pol = policy == "extend" ? tyann::RepairPolicy::Extend
                                               : tyann::RepairPolicy::Post;
  auto result = tyann::apply_with_repairs(g->graph, tcr, matches.front(),
                                          constraints, pol, max_cascade);
  if (!result.ok()) {
    json j = json::object();
    j["error"] = "adaptation failed";
    j["issues"] = report_of(result.issues);
    emit(j);
    return kCheckFailed;
  }
  json j = json::object();
  j["converged"] = result->converged;
  j["rounds"] = result->rounds;
  j["policy"] = policy;
  j["residual"] = result->residual;
  j["trace"] = json::array();
  for (const tyann::TraceEntry& t : result->trace) {
    json e = json::object();
    e["round"] = t.round;
    e["action"] = t.action;
    e["constraint"] = t.constraint;
    e["strategy"] = t.strategy;
    e["graphHash"] = t.graph_hash;
    j["trace"].push_back(e);
  }
  tyann::GraphDoc out = tyann::as_doc(result->graph, loaded->names[1]);
  j["result"] = tyann::to_json(out);
  if (!out_path.empty()) tyann::write_json_file(out_path, tyann::to_json(out));
  emit(j);
  return result->converged ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"type-annotated graph rewriting toolkit"};
  app.require_subcommand(1);

  std::string graph, rule, pattern, typed, out_path, policy = "post";
  std::vector<std::string> constraints;
  int match_index = 0, max_cascade = 8;

  auto* validate = app.add_subcommand("validate", "validate a graph file");
  validate->add_option("graph", graph)->required();

  auto* check = app.add_subcommand("check", "check constraints on a graph");
  check->add_option("graph", graph)->required();
  check->add_option("constraints", constraints)->required();

  auto* match = app.add_subcommand("match", "match a pattern in a graph");
  match->add_option("pattern", pattern)->required();
  match->add_option("graph", graph)->required();

  auto* apply = app.add_subcommand("apply", "apply a rule to a graph");
  apply->add_option("rule", rule)->required();
  apply->add_option("graph", graph)->required();
  apply->add_option("--match-index", match_index);
  apply->add_option("-o,--out", out_path);

  auto* typeann = app.add_subcommand("typeann", "annotate a typed graph");
  typeann->add_option("typed-graph", typed)->required();
  typeann->add_option("-o,--out", out_path);

  auto* extract = app.add_subcommand("extract", "recover typed graphs");
  extract->add_option("graph", graph)->required();

  auto* triple = app.add_subcommand("triple-check", "verify the correspondences");
  triple->add_option("typed-graph", typed)->required();

  auto* adapt = app.add_subcommand("adapt", "type change with repairs");
  adapt->add_option("rule", rule)->required();
  adapt->add_option("graph", graph)->required();
  adapt->add_option("--constraints", constraints);
  adapt->add_option("--policy", policy)->check(CLI::IsMember({"extend", "post"}));
  adapt->add_option("--max-cascade", max_cascade);
  adapt->add_option("-o,--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (validate->parsed()) return cmd_validate(graph);
  if (check->parsed()) return cmd_check(graph, constraints);
  if (match->parsed()) return cmd_match(pattern, graph);
  if (apply->parsed()) return cmd_apply(rule, graph, match_index, out_path);
  if (typeann->parsed()) return cmd_typeann(typed, out_path);
  if (extract->parsed()) return cmd_extract(graph);
  if (triple->parsed()) return cmd_triple_check(typed);
  if (adapt->parsed())
    return cmd_adapt(rule, graph, constraints, policy, max_cascade, out_path);
  return kInputError;
}
