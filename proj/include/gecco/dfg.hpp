#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/event_log.hpp"

namespace gecco {

/// Directly-follows graph over the classes of one log.
class Dfg {
 public:
  using Edge = std::pair<ClassId, ClassId>;

  Dfg() = default;

  explicit Dfg(const EventLog& log)
      : names_(log.class_names()),
        successors_(names_.size()),
        predecessors_(names_.size()),
        class_frequency_(names_.size(), 0) {
    std::vector<std::vector<ClassId>> succ(names_.size()), pred(names_.size());
    std::vector<ClassId> starts, ends;
    for (const auto& trace : log.traces()) {
      const auto& ev = trace.events;
      starts.push_back(ev.front().cls);
      ends.push_back(ev.back().cls);
      for (std::size_t i = 0; i < ev.size(); ++i) {
        ++class_frequency_[ev[i].cls];
        if (i + 1 < ev.size()) {
          ++edges_[{ev[i].cls, ev[i + 1].cls}];
          succ[ev[i].cls].push_back(ev[i + 1].cls);
          pred[ev[i + 1].cls].push_back(ev[i].cls);
        }
      }
    }
    for (std::size_t c = 0; c < names_.size(); ++c) {
      successors_[c] = ClassSet(std::move(succ[c]));
      predecessors_[c] = ClassSet(std::move(pred[c]));
    }
    start_classes_ = ClassSet(std::move(starts));
    end_classes_ = ClassSet(std::move(ends));
  }

  std::size_t node_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& node_names() const noexcept { return names_; }
  const std::map<Edge, std::size_t>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::size_t frequency(ClassId from, ClassId to) const {
    auto it = edges_.find({from, to});
    return it == edges_.end() ? 0 : it->second;
  }
  bool has_edge(ClassId from, ClassId to) const { return edges_.contains({from, to}); }

  const ClassSet& successors(ClassId c) const { check(c); return successors_[c]; }
  const ClassSet& predecessors(ClassId c) const { check(c); return predecessors_[c]; }
  const ClassSet& start_classes() const noexcept { return start_classes_; }
  const ClassSet& end_classes() const noexcept { return end_classes_; }
  std::size_t class_frequency(ClassId c) const { check(c); return class_frequency_[c]; }

  /// External predecessors of `g`: classes outside g with an edge into g.
  ClassSet pre_set(const ClassSet& g) const { return neighbours(g, predecessors_); }

  /// External successors of `g`: classes outside g reached by an edge from g.
  ClassSet post_set(const ClassSet& g) const { return neighbours(g, successors_); }

  /// True iff no edge runs between g1 and g2 in either direction.
  bool non_adjacent(const ClassSet& g1, const ClassSet& g2) const {
    for (ClassId a : g1) {
      if (successors_[a].intersects(g2) || predecessors_[a].intersects(g2)) return false;
    }
    return true;
  }

 private:
  void check(ClassId c) const {
    if (c >= names_.size()) throw UnknownClass("#" + std::to_string(c));
  }

  ClassSet neighbours(const ClassSet& g, const std::vector<ClassSet>& adj) const {
    std::vector<ClassId> out;
    for (ClassId c : g) {
      check(c);
      for (ClassId n : adj[c]) {
        if (!g.contains(n)) out.push_back(n);
      }
    }
    return ClassSet(std::move(out));
  }

  std::vector<std::string> names_;
  std::map<Edge, std::size_t> edges_;
  std::vector<ClassSet> successors_;
  std::vector<ClassSet> predecessors_;
  std::vector<std::size_t> class_frequency_;
  ClassSet start_classes_;
  ClassSet end_classes_;
};

inline Dfg compute_dfg(const EventLog& log) { return Dfg(log); }

enum class Exclusivity {
  edge,   ///< no DFG edge between the two sets (used when merging alternatives)
  trace,  ///< no trace holds events of both sets
};

/// Exclusivity of two disjoint class sets. Throws PreconditionError if they overlap.
inline bool exclusive(const Dfg& dfg, const EventLog& log, const ClassSet& g1, const ClassSet& g2,
                      Exclusivity mode = Exclusivity::edge) {
  if (g1.intersects(g2)) throw PreconditionError("exclusive() needs disjoint groups");
  log.require_known(g1);
  log.require_known(g2);
  if (mode == Exclusivity::edge) return dfg.non_adjacent(g1, g2);
  for (const auto& trace : log.traces()) {
    if (trace.classes.intersects(g1) && trace.classes.intersects(g2)) return false;
  }
  return true;
}

/// Index of registered class sets keyed by their (pre-set, post-set) pair.
class PrePostIndex {
 public:
  explicit PrePostIndex(const Dfg& dfg) : dfg_(&dfg) {}

  void add(const ClassSet& g) {
    auto& bucket = buckets_[key(g)];
    if (std::find(bucket.begin(), bucket.end(), g) == bucket.end()) bucket.push_back(g);
  }

  /// Registered sets other than `g` whose pre- and post-sets equal those of `g`.
  std::vector<ClassSet> equal_pre_post(const ClassSet& g) const {
    auto it = buckets_.find(key(g));
    if (it == buckets_.end()) return {};
    std::vector<ClassSet> out;
    for (const auto& h : it->second) {
      if (h != g) out.push_back(h);
    }
    return out;
  }

 private:
  std::pair<ClassSet, ClassSet> key(const ClassSet& g) const { return {dfg_->pre_set(g), dfg_->post_set(g)}; }

  const Dfg* dfg_;
  std::map<std::pair<ClassSet, ClassSet>, std::vector<ClassSet>> buckets_;
};

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') { out += "\\n"; continue; }
    out += c;
  }
  return out + '"';
}

}  // namespace detail

/// Writes the DFG as Graphviz DOT. Nodes are emitted in lexicographic order.
/// With keep_fraction f < 1 only the ceil(f*|E|) most frequent edges remain;
/// ties prefer the lexicographically smaller (source, target) name pair.
inline void export_dot(const Dfg& dfg, std::ostream& out, double keep_fraction = 1.0) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw PreconditionError("edge keep fraction must lie in (0, 1]");
  }
  const auto& names = dfg.node_names();
  std::vector<std::pair<Dfg::Edge, std::size_t>> edges(dfg.edges().begin(), dfg.edges().end());
  const auto keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(edges.size()) - 1e-9));
  std::stable_sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  edges.resize(std::min(keep, edges.size()));
  std::sort(edges.begin(), edges.end());

  out << "digraph dfg {\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    out << "  " << detail::dot_quote(names[c]) << " [label="
        << detail::dot_quote(names[c] + " (" + std::to_string(dfg.class_frequency(static_cast<ClassId>(c))) + ")")
        << "];\n";
  }
  for (const auto& [edge, freq] : edges) {
    out << "  " << detail::dot_quote(names[edge.first]) << " -> " << detail::dot_quote(names[edge.second])
        << " [label=\"" << freq << "\"];\n";
  }
  out << "}\n";
}

inline void export_dot(const Dfg& dfg, const std::filesystem::path& path, double keep_fraction = 1.0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  export_dot(dfg, out, keep_fraction);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace gecco
