#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/constraints.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"
#include "gecco/optimizer.hpp"

namespace gecco {

enum class AbstractionStrategy { completion_only, start_and_complete };

using ActivityNames = std::map<ClassSet, std::string>;

/// Throws NotACover unless the groups partition the log's classes.
inline void require_cover(std::span<const ClassSet> groups, const EventLog& log) {
  try {
    require_partition(groups, log);
  } catch (const NotAPartition& e) {
    throw NotACover(e.what());
  }
}

namespace detail {

/// (trace index, ordinal) of the earliest event of any class in g.
inline std::pair<std::size_t, std::size_t> first_occurrence(const ClassSet& g, const EventLog& log) {
  const auto& traces = log.traces();
  for (std::size_t t = 0; t < traces.size(); ++t) {
    if (!traces[t].classes.intersects(g)) continue;
    for (const auto& e : traces[t].events) {
      if (g.contains(e.cls)) return {t, e.ordinal};
    }
  }
  return {traces.size(), 0};
}

}  // namespace detail

/// Singletons keep their class name. Larger groups are named
/// `<prefix>_Activity <i>` when all their classes share one value of `attr`,
/// else `G<i>`; numbering follows first occurrence in the log, per prefix.
inline ActivityNames default_names(std::span<const ClassSet> groups, const EventLog& log,
                                   const std::optional<std::string>& attr = std::nullopt) {
  std::vector<const ClassSet*> order;
  for (const auto& g : groups) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(), [&](const ClassSet* a, const ClassSet* b) {
    return detail::first_occurrence(*a, log) < detail::first_occurrence(*b, log);
  });

  ActivityNames names;
  std::set<std::string> taken;
  for (const auto& g : groups) {
    if (g.size() == 1) taken.insert(log.class_name(g[0]));
  }
  std::map<std::string, std::size_t> counters;
  std::size_t fallback = 0;
  for (const ClassSet* g : order) {
    std::string name;
    if (g->size() == 1) {
      name = log.class_name((*g)[0]);
    } else {
      std::optional<std::string> prefix;
      if (attr) {
        std::set<AttributeValue> values;
        for (ClassId c : *g) {
          const auto& vs = log.class_attribute(c, *attr);
          values.insert(vs.begin(), vs.end());
        }
        if (values.size() == 1) prefix = to_string(*values.begin());
      }
      name = prefix ? *prefix + "_Activity " + std::to_string(++counters[*prefix]) : "G" + std::to_string(++fallback);
      if (taken.contains(name)) {
        std::size_t n = 2;
        while (taken.contains(name + " (" + std::to_string(n) + ")")) ++n;
        name += " (" + std::to_string(n) + ")";
      }
      taken.insert(name);
    }
    names.emplace(*g, std::move(name));
  }
  return names;
}

/// Rewrites every trace into activity events. completion_only keeps the last
/// event of each group instance; start_and_complete keeps the first (`_s`) and
/// last (`_c`) events of multi-event instances and the sole event of unary ones.
/// Retained events keep their timestamps and gain `duration` (seconds) and `n_events`.
inline EventLog abstract_log(const EventLog& log, std::span<const ClassSet> groups, AbstractionStrategy strategy,
                             const ActivityNames& names = {}, InstanceOptions opts = {}) {
  require_cover(groups, log);
  ActivityNames all = default_names(groups, log);
  for (const auto& [g, n] : names) {
    if (all.contains(g)) all[g] = n;
  }
  std::set<std::string> distinct;
  for (const auto& [g, n] : all) distinct.insert(n);
  if (distinct.size() != all.size()) throw PreconditionError("activity names must be distinct");

  struct Out {
    std::size_t ordinal;
    std::string label;
    double duration;
    std::int64_t size;
  };
  EventLog::Builder builder;
  for (const auto& trace : log.traces()) {
    std::vector<Out> kept;
    for (const auto& g : groups) {
      const std::string& label = all.at(g);
      for (const auto& xi : instances(trace, g, opts)) {
        const double duration =
            static_cast<double>(xi.event(xi.size() - 1).time.millis - xi.event(0).time.millis) / 1000.0;
        const auto n = static_cast<std::int64_t>(xi.size());
        if (strategy == AbstractionStrategy::completion_only || xi.size() == 1) {
          kept.push_back({xi.last(), label, duration, n});
        } else {
          kept.push_back({xi.first(), label + "_s", duration, n});
          kept.push_back({xi.last(), label + "_c", duration, n});
        }
      }
    }
    std::sort(kept.begin(), kept.end(), [](const Out& a, const Out& b) { return a.ordinal < b.ordinal; });
    for (auto& k : kept) {
      Attributes attrs;
      attrs.emplace("duration", k.duration);
      attrs.emplace("n_events", k.size);
      builder.add(trace.id, std::move(k.label), trace.events[k.ordinal].time, std::move(attrs));
    }
  }
  return std::move(builder).build();
}

inline EventLog abstract_log(const EventLog& log, const Grouping& grouping, AbstractionStrategy strategy,
                             const ActivityNames& names = {}, InstanceOptions opts = {}) {
  return abstract_log(log, std::span<const ClassSet>(grouping.groups), strategy, names, opts);
}

}  // namespace gecco
