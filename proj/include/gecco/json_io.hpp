#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gecco/abstraction.hpp"
#include "gecco/candidates.hpp"
#include "gecco/constraints.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"
#include "gecco/metrics.hpp"
#include "gecco/optimizer.hpp"

namespace gecco {

using Json = nlohmann::ordered_json;

inline Json names_json(const EventLog& log, const ClassSet& g) { return Json(log.names_of(g)); }

/// One line per candidate: {"classes": [...], "distance": d, "provenance": p}.
inline void write_candidates_jsonl(std::ostream& out, const EventLog& log, const CandidateSet& cands,
                                   const DistanceCache& dist) {
  for (const auto& [g, c] : cands) {
    Json row;
    row["classes"] = names_json(log, g);
    row["distance"] = dist(g);
    row["provenance"] = to_string(c.provenance);
    out << row.dump() << '\n';
  }
}

inline CandidateSet read_candidates_jsonl(std::istream& in, const EventLog& log) {
  CandidateSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!row.is_object() || !row.contains("classes") || !row["classes"].is_array() || row["classes"].empty()) {
      throw ParseError(line_no, "expected {\"classes\": [...]}");
    }
    std::vector<std::string> names;
    for (const auto& n : row["classes"]) {
      if (!n.is_string()) throw ParseError(line_no, "class names must be strings");
      names.push_back(n.get<std::string>());
    }
    Provenance p = Provenance::exhaustive;
    if (row.contains("provenance")) {
      auto parsed = row["provenance"].is_string() ? provenance_from_string(row["provenance"].get<std::string>())
                                                  : std::nullopt;
      if (!parsed) throw ParseError(line_no, "unknown provenance");
      p = *parsed;
    }
    out.insert(log.classes_of(names), p);
  }
  return out;
}

inline Json grouping_json(const EventLog& log, const Grouping& g, SolveStatus status) {
  Json j;
  j["status"] = to_string(status);
  j["objective"] = g.objective;
  Json groups = Json::array();
  for (const auto& grp : g.groups) groups.push_back(names_json(log, grp));
  j["groups"] = std::move(groups);
  return j;
}

/// Reads {"groups": [[...], ...]} as written by grouping_json.
inline std::vector<ClassSet> read_grouping_json(std::istream& in, const EventLog& log) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.byte, std::string("malformed grouping JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("groups") || !j["groups"].is_array()) {
    throw ParseError(1, "expected {\"groups\": [[...], ...]}");
  }
  std::vector<ClassSet> out;
  for (const auto& grp : j["groups"]) {
    if (!grp.is_array()) throw ParseError(1, "each group must be an array of class names");
    std::vector<std::string> names;
    for (const auto& n : grp) {
      if (!n.is_string()) throw ParseError(1, "class names must be strings");
      names.push_back(n.get<std::string>());
    }
    out.push_back(log.classes_of(names));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Json activity_names_json(const EventLog& log, const ActivityNames& names) {
  Json arr = Json::array();
  for (const auto& [g, n] : names) {
    Json row;
    row["name"] = n;
    row["classes"] = names_json(log, g);
    arr.push_back(std::move(row));
  }
  return arr;
}

inline Json quality_json(const QualityReport& r) {
  Json j;
  j["size_reduction"] = r.size_reduction;
  j["dfg_edge_reduction"] = r.dfg_edge_reduction;
  j["silhouette"] = r.silhouette ? Json(*r.silhouette) : Json(nullptr);
  j["group_count"] = r.group_count;
  j["class_count"] = r.class_count;
  return j;
}

inline Json violation_json(const Violation& v) {
  Json j;
  j["constraint"] = v.constraint;
  j["scope"] = to_string(v.scope);
  j["monotonicity"] = to_string(v.monotonicity);
  j["classes"] = v.classes;
  if (v.scope == Scope::instance_based) {
    j["violating_instances"] = v.violating_instances;
    j["total_instances"] = v.total_instances;
    j["violating_fraction"] =
        v.total_instances ? static_cast<double>(v.violating_instances) / static_cast<double>(v.total_instances) : 0.0;
    j["violating_cases"] = v.violating_cases;
    j["total_cases"] = v.total_cases;
    j["case_fraction"] =
        v.total_cases ? static_cast<double>(v.violating_cases) / static_cast<double>(v.total_cases) : 0.0;
    if (v.unknown_attribute) j["unknown_attribute"] = true;
  }
  return j;
}

inline Json infeasibility_json(const InfeasibilityReport& r) {
  Json j;
  j["uncovered_classes"] = r.uncovered_classes;
  Json ev = Json::array();
  for (const auto& e : r.evidence) {
    Json row;
    row["class"] = e.cls;
    Json vs = Json::array();
    for (const auto& v : e.violations) vs.push_back(violation_json(v));
    row["violations"] = std::move(vs);
    ev.push_back(std::move(row));
  }
  j["evidence"] = std::move(ev);
  j["bound_conflicts"] = r.bound_conflicts;
  j["min_cover_size"] = r.min_cover_size ? Json(*r.min_cover_size) : Json(nullptr);
  j["max_cover_size"] = r.max_cover_size ? Json(*r.max_cover_size) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

}  // namespace gecco
