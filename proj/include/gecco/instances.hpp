#pragma once

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/event_log.hpp"

namespace gecco {

/// Controls how a projected trace is split into repeated instances.
struct InstanceOptions {
  /// Occurrences of one class allowed inside a single instance. The
  /// (max_repeats + 1)-th occurrence starts a new instance.
  std::size_t max_repeats = 1;

  friend bool operator==(const InstanceOptions&, const InstanceOptions&) = default;
};

/// One realisation of a group inside a trace: ordinals of its events, ascending.
struct GroupInstance {
  const Trace* trace = nullptr;
  std::vector<std::size_t> ordinals;

  std::size_t size() const noexcept { return ordinals.size(); }
  std::size_t first() const { return ordinals.front(); }
  std::size_t last() const { return ordinals.back(); }
  std::pair<std::size_t, std::size_t> span() const { return {first(), last()}; }
  const std::string& trace_id() const { return trace->id; }
  const Event& event(std::size_t i) const { return trace->events[ordinals[i]]; }
};

/// Instances of `g` in one trace: the projection of the trace onto g, cut
/// whenever an incoming class already reached `max_repeats` occurrences in
/// the current instance.
inline std::vector<GroupInstance> instances(const Trace& trace, const ClassSet& g, InstanceOptions opts = {}) {
  std::vector<GroupInstance> out;
  if (!trace.classes.intersects(g)) return out;
  GroupInstance current{&trace, {}};
  std::vector<std::pair<ClassId, std::size_t>> counts;
  for (const auto& e : trace.events) {
    if (!g.contains(e.cls)) continue;
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == e.cls; });
    if (it != counts.end() && it->second >= opts.max_repeats) {
      out.push_back(std::move(current));
      current = GroupInstance{&trace, {}};
      counts.clear();
      it = counts.end();
    }
    if (it == counts.end()) counts.emplace_back(e.cls, 1);
    else ++it->second;
    current.ordinals.push_back(e.ordinal);
  }
  if (!current.ordinals.empty()) out.push_back(std::move(current));
  return out;
}

/// inst(L, g): instances across all traces, in trace order.
inline std::vector<GroupInstance> instances(const EventLog& log, const ClassSet& g, InstanceOptions opts = {}) {
  std::vector<GroupInstance> out;
  for (const auto& trace : log.traces()) {
    auto part = instances(trace, g, opts);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

/// Events strictly inside the instance's span that do not belong to it.
inline std::size_t interrupts(const GroupInstance& xi) {
  return (xi.last() - xi.first() + 1) - xi.size();
}

/// Classes of `g` absent from the instance.
inline std::size_t missing(const GroupInstance& xi, const ClassSet& g) {
  std::vector<ClassId> seen;
  seen.reserve(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) seen.push_back(xi.event(i).cls);
  return g.size() - ClassSet(std::move(seen)).size();
}

/// Mean over all instances of interrupts/|xi| + missing/|g| + 1/|g|.
/// Throws NoInstances if no class of g occurs in the log.
inline double group_distance(const EventLog& log, const ClassSet& g, InstanceOptions opts = {}) {
  if (g.empty()) throw PreconditionError("group must be non-empty");
  log.require_known(g);
  const double group_size = static_cast<double>(g.size());
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& trace : log.traces()) {
    for (const auto& xi : instances(trace, g, opts)) {
      total += static_cast<double>(interrupts(xi)) / static_cast<double>(xi.size()) +
               static_cast<double>(missing(xi, g)) / group_size + 1.0 / group_size;
      ++count;
    }
  }
  if (count == 0) throw NoInstances("group never occurs in the log");
  return total / static_cast<double>(count);
}

inline double grouping_distance(const EventLog& log, std::span<const ClassSet> groups, InstanceOptions opts = {}) {
  if (groups.empty()) throw NotACover("empty grouping covers no classes");
  double sum = 0.0;
  for (const auto& g : groups) sum += group_distance(log, g, opts);
  return sum;
}

/// Per-log memo of group distances. Safe for concurrent lookups and inserts.
class DistanceCache {
 public:
  DistanceCache(const EventLog& log, InstanceOptions opts = {}) : log_(&log), opts_(opts) {}

  double operator()(const ClassSet& g) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = values_.find(g); it != values_.end()) return it->second;
    }
    const double d = group_distance(*log_, g, opts_);
    std::unique_lock lock(mutex_);
    return values_.try_emplace(g, d).first->second;
  }

  const EventLog& log() const noexcept { return *log_; }
  InstanceOptions options() const noexcept { return opts_; }

 private:
  const EventLog* log_;
  InstanceOptions opts_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<ClassSet, double, ClassSetHash> values_;
};

}  // namespace gecco
