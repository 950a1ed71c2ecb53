#pragma once

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gecco/abstraction.hpp"
#include "gecco/class_set.hpp"
#include "gecco/dfg.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"

namespace gecco {

inline double size_reduction(std::span<const ClassSet> groups, const EventLog& log) {
  require_cover(groups, log);
  return 1.0 - static_cast<double>(groups.size()) / static_cast<double>(log.class_count());
}

/// 1 - |E(abstracted)| / |E(original)|; 0 when the original DFG has no edges.
inline double dfg_edge_reduction(const EventLog& original, const EventLog& abstracted) {
  const auto before = Dfg(original).edge_count();
  if (before == 0) return 0.0;
  return 1.0 - static_cast<double>(Dfg(abstracted).edge_count()) / static_cast<double>(before);
}

/// Average positional distance between classes. For each trace with both
/// classes, the mean |ordinal difference| over their event pairs; averaged over
/// those traces. Never co-occurring pairs get the longest trace length.
inline std::vector<std::vector<double>> positional_distances(const EventLog& log) {
  const std::size_t n = log.class_count();
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::size_t>> traces(n, std::vector<std::size_t>(n, 0));
  std::size_t longest = 0;
  for (const auto& trace : log.traces()) {
    longest = std::max(longest, trace.events.size());
    std::vector<std::vector<std::size_t>> pos(n);
    for (const auto& e : trace.events) pos[e.cls].push_back(e.ordinal);
    for (ClassId a : trace.classes) {
      for (ClassId b : trace.classes) {
        if (a >= b) continue;
        double total = 0.0;
        for (auto i : pos[a]) {
          for (auto j : pos[b]) total += static_cast<double>(i > j ? i - j : j - i);
        }
        const double mean = total / static_cast<double>(pos[a].size() * pos[b].size());
        sum[a][b] += mean;
        sum[b][a] += mean;
        ++traces[a][b];
        ++traces[b][a];
      }
    }
  }
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      d[a][b] = traces[a][b] ? sum[a][b] / static_cast<double>(traces[a][b]) : static_cast<double>(longest);
    }
  }
  return d;
}

/// Mean silhouette over all classes using positional distances. Classes in
/// singleton groups score 0. Throws TooFewGroups for fewer than two groups.
inline double silhouette(std::span<const ClassSet> groups, const EventLog& log) {
  require_cover(groups, log);
  if (groups.size() < 2) throw TooFewGroups();
  const auto d = positional_distances(log);
  auto mean_to = [&](ClassId c, const ClassSet& g) {
    double total = 0.0;
    std::size_t k = 0;
    for (ClassId o : g) {
      if (o == c) continue;
      total += d[c][o];
      ++k;
    }
    return total / static_cast<double>(k);
  };
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.size() == 1) continue;
    for (ClassId c : g) {
      const double a = mean_to(c, g);
      double b = std::numeric_limits<double>::infinity();
      for (const auto& h : groups) {
        if (&h != &g) b = std::min(b, mean_to(c, h));
      }
      const double m = std::max(a, b);
      if (m > 0.0) total += (b - a) / m;
    }
  }
  return total / static_cast<double>(log.class_count());
}

struct QualityReport {
  double size_reduction = 0.0;
  double dfg_edge_reduction = 0.0;
  /// Absent for groupings with fewer than two groups.
  std::optional<double> silhouette;
  std::size_t group_count = 0;
  std::size_t class_count = 0;
};

inline QualityReport quality_report(const EventLog& log, std::span<const ClassSet> groups, const EventLog& abstracted) {
  QualityReport r;
  r.size_reduction = size_reduction(groups, log);
  r.dfg_edge_reduction = dfg_edge_reduction(log, abstracted);
  if (groups.size() >= 2) r.silhouette = silhouette(groups, log);
  r.group_count = groups.size();
  r.class_count = log.class_count();
  return r;
}

}  // namespace gecco
