#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "gecco/candidates.hpp"
#include "gecco/class_set.hpp"
#include "gecco/constraints.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"
#include "gecco/parallel.hpp"

namespace gecco {

inline constexpr double objective_tolerance = 1e-9;

/// An exact cover of the log's classes. Groups are kept sorted.
struct Grouping {
  std::vector<ClassSet> groups;
  double objective = 0.0;

  std::size_t size() const noexcept { return groups.size(); }
  friend bool operator==(const Grouping& a, const Grouping& b) { return a.groups == b.groups; }
};

/// Preference between two covers: lower objective (beyond the tolerance),
/// then fewer groups, then the lexicographically smaller sorted group list.
inline bool better_cover(double obj_a, const std::vector<ClassSet>& a, double obj_b, const std::vector<ClassSet>& b) {
  if (obj_a < obj_b - objective_tolerance) return true;
  if (obj_b < obj_a - objective_tolerance) return false;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Weighted set-partitioning instance over classes 0..class_count-1.
struct CoverProblem {
  std::size_t class_count = 0;
  std::vector<ClassSet> groups;
  std::vector<double> weights;
  std::optional<std::size_t> max_groups;
  std::optional<std::size_t> min_groups;

  /// Weights are group distances under the constraint set's instance semantics.
  static CoverProblem build(const EventLog& log, const CandidateSet& cands, const ConstraintSet& rs,
                            std::size_t threads = 0) {
    CoverProblem p;
    p.class_count = log.class_count();
    p.groups = cands.groups();
    p.weights.resize(p.groups.size());
    const auto opts = rs.instance_options();
    parallel_for(p.groups.size(), threads, [&](std::size_t i) { p.weights[i] = group_distance(log, p.groups[i], opts); });
    p.max_groups = rs.max_groups();
    p.min_groups = rs.min_groups();
    return p;
  }

  /// Classes covered by no group.
  std::vector<ClassId> uncovered() const {
    std::vector<bool> hit(class_count, false);
    for (const auto& g : groups) {
      for (ClassId c : g) {
        if (c < class_count) hit[c] = true;
      }
    }
    std::vector<ClassId> out;
    for (ClassId c = 0; c < class_count; ++c) {
      if (!hit[c]) out.push_back(c);
    }
    return out;
  }
};

enum class SolveStatus { optimal, feasible, infeasible, timeout };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout: return "timeout";
  }
  return "?";
}

/// optimal: proven best cover. feasible: best incumbent when the time limit hit.
/// infeasible: no cover respects the bounds. timeout: limit hit with no incumbent.
struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Grouping> grouping;
  std::size_t nodes = 0;

  bool proven() const noexcept { return status == SolveStatus::optimal; }
};

namespace detail {

using Bits = boost::dynamic_bitset<std::uint64_t>;

struct CoverSearch {
  const CoverProblem& problem;
  const std::vector<double>& weights;
  std::optional<std::size_t> max_groups;
  std::optional<std::size_t> min_groups;
  Clock::time_point deadline;

  SolveResult run() const {
    const std::size_t n = problem.class_count;
    SolveResult result;
    if (n == 0) throw PreconditionError("cover problem has no classes");
    if (max_groups && min_groups && *min_groups > *max_groups) return result;

    std::vector<Bits> masks;
    std::vector<std::vector<std::uint32_t>> covering(n);
    std::vector<double> share(n, std::numeric_limits<double>::infinity());
    std::size_t largest = 1;
    for (std::uint32_t i = 0; i < problem.groups.size(); ++i) {
      const auto& g = problem.groups[i];
      Bits m(n);
      bool valid = !g.empty();
      for (ClassId c : g) {
        if (c >= n) valid = false;
        else m.set(c);
      }
      masks.push_back(std::move(m));
      if (!valid) continue;
      largest = std::max(largest, g.size());
      const double s = weights[i] / static_cast<double>(g.size());
      for (ClassId c : g) {
        covering[c].push_back(i);
        share[c] = std::min(share[c], s);
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (covering[c].empty()) return result;
    }

    struct Node {
      double cost;
      double bound;
      Bits covered;
      std::vector<std::uint32_t> chosen;
    };
    auto worse = [](const Node& a, const Node& b) {
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.chosen.size() != b.chosen.size()) return a.chosen.size() > b.chosen.size();
      return a.chosen > b.chosen;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
    double root_bound = 0.0;
    for (double s : share) root_bound += s;
    open.push(Node{0.0, root_bound, Bits(n), {}});

    std::optional<double> best_obj;
    std::vector<ClassSet> best_groups;
    bool expired = false;

    auto groups_of = [&](const std::vector<std::uint32_t>& chosen) {
      std::vector<ClassSet> gs;
      for (auto i : chosen) gs.push_back(problem.groups[i]);
      std::sort(gs.begin(), gs.end());
      return gs;
    };

    while (!open.empty()) {
      if ((++result.nodes & 1023u) == 0 && Clock::now() > deadline) {
        expired = true;
        break;
      }
      Node node = open.top();
      open.pop();
      if (best_obj && node.bound > *best_obj + objective_tolerance) break;

      const std::size_t uncovered = n - node.covered.count();
      if (uncovered == 0) {
        const std::size_t k = node.chosen.size();
        if (min_groups && k < *min_groups) continue;
        auto gs = groups_of(node.chosen);
        if (!best_obj || better_cover(node.cost, gs, *best_obj, best_groups)) {
          best_obj = node.cost;
          best_groups = std::move(gs);
        }
        continue;
      }
      const std::size_t need = (uncovered + largest - 1) / largest;
      if (max_groups && node.chosen.size() + need > *max_groups) continue;
      if (min_groups && node.chosen.size() + uncovered < *min_groups) continue;

      std::size_t pivot = 0;
      while (node.covered.test(pivot)) ++pivot;
      for (std::uint32_t i : covering[pivot]) {
        if (masks[i].intersects(node.covered)) continue;
        Node child{node.cost + weights[i], 0.0, node.covered | masks[i], node.chosen};
        child.chosen.push_back(i);
        child.bound = child.cost;
        for (std::size_t c = 0; c < n; ++c) {
          if (!child.covered.test(c)) child.bound += share[c];
        }
        if (best_obj && child.bound > *best_obj + objective_tolerance) continue;
        open.push(std::move(child));
      }
    }

    if (best_obj) {
      result.grouping = Grouping{std::move(best_groups), *best_obj};
      result.status = expired ? SolveStatus::feasible : SolveStatus::optimal;
    } else {
      result.status = expired ? SolveStatus::timeout : SolveStatus::infeasible;
    }
    return result;
  }
};

}  // namespace detail

/// Minimum-weight exact cover respecting the group-count bounds, by best-first
/// branch and bound. Branches on the lowest uncovered class; the bound adds,
/// per uncovered class, the cheapest per-class share of a covering candidate.
inline SolveResult solve_exact(const CoverProblem& problem,
                               std::chrono::milliseconds time_limit = std::chrono::hours(5)) {
  if (problem.groups.empty()) throw NoCandidates();
  if (problem.weights.size() != problem.groups.size()) throw PreconditionError("one weight per candidate required");
  for (double w : problem.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("candidate weights must be finite and non-negative");
  }
  return detail::CoverSearch{problem, problem.weights, problem.max_groups, problem.min_groups,
                             Clock::now() + time_limit}
      .run();
}

/// Smallest and largest number of groups over all exact covers, ignoring bounds.
inline std::pair<std::optional<std::size_t>, std::optional<std::size_t>> cover_size_range(
    const CoverProblem& problem, std::chrono::milliseconds time_limit = std::chrono::minutes(1)) {
  std::vector<double> ones(problem.groups.size(), 1.0);
  std::vector<double> slack(problem.groups.size());
  for (std::size_t i = 0; i < slack.size(); ++i) slack[i] = static_cast<double>(problem.groups[i].size()) - 1.0;
  const auto deadline = Clock::now() + time_limit;
  auto fewest = detail::CoverSearch{problem, ones, std::nullopt, std::nullopt, deadline}.run();
  auto most = detail::CoverSearch{problem, slack, std::nullopt, std::nullopt, deadline}.run();
  std::optional<std::size_t> lo, hi;
  if (fewest.status == SolveStatus::optimal) lo = fewest.grouping->size();
  if (most.status == SolveStatus::optimal) hi = most.grouping->size();
  return {lo, hi};
}

/// Evidence for why no grouping could be selected.
struct InfeasibilityReport {
  struct ClassEvidence {
    std::string cls;
    std::vector<Violation> violations;
  };

  std::vector<std::string> uncovered_classes;
  std::vector<ClassEvidence> evidence;
  std::vector<std::string> bound_conflicts;
  std::optional<std::size_t> min_cover_size;
  std::optional<std::size_t> max_cover_size;
  std::vector<std::string> notes;

  bool empty() const noexcept {
    return uncovered_classes.empty() && bound_conflicts.empty() && notes.empty();
  }
};

/// Explains an infeasible problem. Throws PreconditionError if a cover exists.
inline InfeasibilityReport diagnose(const CoverProblem& problem, const ConstraintSet& rs, const EventLog& log,
                                    std::chrono::milliseconds time_limit = std::chrono::minutes(1)) {
  InfeasibilityReport report;
  for (ClassId c : problem.uncovered()) {
    report.uncovered_classes.push_back(log.class_name(c));
    CheckOptions all;
    all.short_circuit = false;
    auto verdict = check_group(ClassSet::singleton(c), rs, log, all);
    report.evidence.push_back({log.class_name(c), std::move(verdict.violations)});
  }
  if (report.uncovered_classes.empty()) {
    if (problem.groups.empty()) throw NoCandidates();
    auto [lo, hi] = cover_size_range(problem, time_limit);
    report.min_cover_size = lo;
    report.max_cover_size = hi;
    if (!lo) {
      report.notes.push_back("the candidate groups admit no exact cover of the classes");
    } else {
      const auto x = problem.max_groups;
      const auto y = problem.min_groups;
      if (x && *lo > *x) {
        report.bound_conflicts.push_back("grouping count <= " + std::to_string(*x) + ": every exact cover needs at least " +
                                         std::to_string(*lo) + " groups");
      }
      if (y && hi && *hi < *y) {
        report.bound_conflicts.push_back("grouping count >= " + std::to_string(*y) + ": no exact cover has more than " +
                                         std::to_string(*hi) + " groups");
      }
      if (x && y && *y > *x) {
        report.bound_conflicts.push_back("grouping count bounds are contradictory: at least " + std::to_string(*y) +
                                         " and at most " + std::to_string(*x));
      }
      if (report.bound_conflicts.empty()) {
        auto probe = solve_exact(problem, time_limit);
        if (probe.grouping) throw PreconditionError("problem is feasible");
        report.notes.push_back("no exact cover has a group count within the bounds");
      }
    }
  }
  return report;
}

/// Pairwise greedy merging from singletons. Merges the admissible pair that
/// lowers the total distance most and stops when no merge lowers it.
/// Grouping-count constraints are not enforced.
inline Grouping solve_greedy(const EventLog& log, const ConstraintSet& rs, std::size_t threads = 0) {
  DistanceCache dist(log, rs.instance_options());
  std::vector<ClassSet> groups;
  for (ClassId c = 0; c < log.class_count(); ++c) {
    auto g = ClassSet::singleton(c);
    auto verdict = holds_group(g, rs, log);
    if (!verdict.holds) {
      throw Infeasible("class '" + log.class_name(c) + "' violates " + verdict.violations.front().constraint);
    }
    groups.push_back(std::move(g));
  }

  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) pairs.emplace_back(i, j);
    }
    std::vector<std::optional<double>> delta(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
      const auto& [i, j] = pairs[p];
      const ClassSet merged = groups[i].unite(groups[j]);
      if (!occurs(merged, log) || !holds_group(merged, rs, log).holds) return;
      delta[p] = dist(merged) - dist(groups[i]) - dist(groups[j]);
    });
    std::optional<std::size_t> pick;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (delta[p] && *delta[p] < -objective_tolerance && (!pick || *delta[p] < *delta[*pick])) pick = p;
    }
    if (!pick) break;
    const auto [i, j] = pairs[*pick];
    groups[i] = groups[i].unite(groups[j]);
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(groups.begin(), groups.end());
  }

  Grouping out{std::move(groups), 0.0};
  for (const auto& g : out.groups) out.objective += dist(g);
  return out;
}

/// Turns a sorted list of groups into a Grouping with its objective.
inline Grouping make_grouping(const EventLog& log, std::vector<ClassSet> groups, InstanceOptions opts = {}) {
  std::sort(groups.begin(), groups.end());
  Grouping g{std::move(groups), 0.0};
  g.objective = grouping_distance(log, g.groups, opts);
  return g;
}

}  // namespace gecco
