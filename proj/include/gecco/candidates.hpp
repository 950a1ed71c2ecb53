#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/constraints.hpp"
#include "gecco/dfg.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"
#include "gecco/parallel.hpp"

namespace gecco {

enum class Provenance { exhaustive, dfg_path, exclusive_merge };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exhaustive: return "exhaustive";
    case Provenance::dfg_path: return "dfg_path";
    case Provenance::exclusive_merge: return "exclusive_merge";
  }
  return "?";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "exhaustive") return Provenance::exhaustive;
  if (s == "dfg_path") return Provenance::dfg_path;
  if (s == "exclusive_merge") return Provenance::exclusive_merge;
  return std::nullopt;
}

struct Candidate {
  ClassSet classes;
  Provenance provenance = Provenance::exhaustive;
  /// False when admitted through a known subset without evaluating constraints.
  bool checked = true;
};

/// Candidate groups keyed by class set, iterated in class-set order.
class CandidateSet {
 public:
  /// Returns false (keeping the first entry) if the class set is already present.
  bool insert(Candidate c) {
    auto [it, fresh] = items_.try_emplace(c.classes, c);
    return fresh;
  }
  bool insert(const ClassSet& g, Provenance p, bool checked = true) { return insert(Candidate{g, p, checked}); }

  bool contains(const ClassSet& g) const { return items_.contains(g); }
  const Candidate* find(const ClassSet& g) const {
    auto it = items_.find(g);
    return it == items_.end() ? nullptr : &it->second;
  }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::vector<ClassSet> groups() const {
    std::vector<ClassSet> out;
    out.reserve(items_.size());
    for (const auto& [g, c] : items_) out.push_back(g);
    return out;
  }

  friend bool operator==(const CandidateSet& a, const CandidateSet& b) {
    return a.groups() == b.groups();
  }

 private:
  std::map<ClassSet, Candidate> items_;
};

using Clock = std::chrono::steady_clock;

struct SearchOptions {
  std::chrono::milliseconds timeout = std::chrono::hours(5);
  /// 0 selects the machine's hardware concurrency.
  std::size_t threads = 0;
};

struct SearchResult {
  CandidateSet candidates;
  bool truncated = false;
  std::size_t groups_checked = 0;
};

/// Beam width for DFG search; nullopt means unlimited.
using BeamWidth = std::optional<std::size_t>;

inline std::size_t default_beam_width(const EventLog& log) { return 5 * log.class_count(); }

/// True iff some trace holds at least one event of every class in g.
inline bool occurs(const ClassSet& g, const EventLog& log) {
  if (g.empty()) throw PreconditionError("group must be non-empty");
  ClassId rarest = g[0];
  for (ClassId c : g) {
    if (c >= log.class_count()) return false;
    if (log.traces_with(c).size() < log.traces_with(rarest).size()) rarest = c;
  }
  for (std::size_t t : log.traces_with(rarest)) {
    if (g.is_subset_of(log.traces()[t].classes)) return true;
  }
  return false;
}

namespace detail {

struct Assessment {
  bool admitted = false;
  bool checked = false;
  /// False when a violated constraint is anti-monotonic.
  bool expandable = true;
};

/// Evaluates toCheck under the checking mode. In anti-monotonic mode the
/// check runs to completion so that expansion can skip only groups failing
/// an anti-monotonic constraint.
inline std::vector<Assessment> assess(const std::vector<ClassSet>& groups, const ConstraintSet& rs, const EventLog& log,
                                      CheckingMode mode, const std::vector<bool>& subset_admitted,
                                      Clock::time_point deadline, std::size_t threads, bool& truncated) {
  std::vector<Assessment> out(groups.size());
  std::atomic<bool> expired{false};
  parallel_for(groups.size(), threads, [&](std::size_t i) {
    if (expired.load(std::memory_order_relaxed)) return;
    if (Clock::now() > deadline) {
      expired = true;
      return;
    }
    auto& a = out[i];
    if (mode == CheckingMode::monotonic && subset_admitted[i]) {
      a.admitted = true;
      return;
    }
    CheckOptions opts;
    opts.short_circuit = mode != CheckingMode::anti_monotonic;
    auto verdict = check_group(groups[i], rs, log, opts);
    a.checked = true;
    a.admitted = verdict.holds;
    a.expandable = !verdict.violates_anti_monotonic();
  });
  if (expired) truncated = true;
  return out;
}

}  // namespace detail

/// Level-wise search over all occurring groups.
inline SearchResult exhaustive_candidates(const EventLog& log, const ConstraintSet& rs, SearchOptions opts = {}) {
  const auto deadline = Clock::now() + opts.timeout;
  const CheckingMode mode = checking_mode(rs);
  SearchResult result;
  std::unordered_set<ClassSet, ClassSetHash> admitted;

  std::vector<ClassSet> to_check;
  for (ClassId c = 0; c < log.class_count(); ++c) to_check.push_back(ClassSet::singleton(c));

  while (!to_check.empty()) {
    std::vector<bool> subset_admitted(to_check.size(), false);
    if (mode == CheckingMode::monotonic) {
      for (std::size_t i = 0; i < to_check.size(); ++i) {
        const auto& g = to_check[i];
        if (g.size() < 2) continue;
        subset_admitted[i] = std::any_of(g.begin(), g.end(), [&](ClassId c) {
          return admitted.contains(g.without(ClassSet::singleton(c)));
        });
      }
    }
    const auto verdicts =
        detail::assess(to_check, rs, log, mode, subset_admitted, deadline, opts.threads, result.truncated);

    std::vector<const ClassSet*> expand;
    for (std::size_t i = 0; i < to_check.size(); ++i) {
      const auto& a = verdicts[i];
      if (a.checked) ++result.groups_checked;
      if (a.admitted) {
        admitted.insert(to_check[i]);
        result.candidates.insert(to_check[i], Provenance::exhaustive, a.checked);
      }
      if (result.truncated) continue;
      if (mode != CheckingMode::anti_monotonic || a.admitted || a.expandable) expand.push_back(&to_check[i]);
    }
    if (result.truncated) break;

    std::set<ClassSet> next;
    for (const ClassSet* g : expand) {
      for (ClassId c = 0; c < log.class_count(); ++c) {
        if (!g->contains(c)) next.insert(g->with(c));
      }
    }
    to_check.clear();
    for (const auto& g : next) {
      if (occurs(g, log)) to_check.push_back(g);
    }
  }
  return result;
}

/// Beam search over DFG paths. Each iteration ranks the node sets of the
/// current paths by distance (ties by class set) and processes the first k.
inline SearchResult dfg_candidates(const EventLog& log, const ConstraintSet& rs, BeamWidth k = std::nullopt,
                                   SearchOptions opts = {}) {
  if (k && *k < 1) throw PreconditionError("beam width must be at least 1");
  const auto deadline = Clock::now() + opts.timeout;
  const CheckingMode mode = checking_mode(rs);
  const Dfg dfg(log);
  DistanceCache dist(log, rs.instance_options());
  SearchResult result;
  std::vector<ClassSet> admitted;

  using Path = std::vector<ClassId>;
  std::vector<Path> to_check;
  for (ClassId c = 0; c < log.class_count(); ++c) to_check.push_back({c});

  while (!to_check.empty()) {
    // One path per node set: the lexicographically smallest.
    std::map<ClassSet, Path> by_set;
    for (auto& p : to_check) {
      ClassSet g{std::vector<ClassId>(p)};
      auto it = by_set.find(g);
      if (it == by_set.end()) by_set.emplace(std::move(g), std::move(p));
      else if (p < it->second) it->second = std::move(p);
    }
    std::vector<std::pair<ClassSet, Path>> sorted(std::make_move_iterator(by_set.begin()),
                                                  std::make_move_iterator(by_set.end()));
    if (k && *k < sorted.size()) {
      std::vector<double> d(sorted.size());
      parallel_for(sorted.size(), opts.threads, [&](std::size_t i) { d[i] = dist(sorted[i].first); });
      std::vector<std::size_t> order(sorted.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
      order.resize(*k);
      std::vector<std::pair<ClassSet, Path>> beam;
      for (std::size_t i : order) beam.push_back(std::move(sorted[i]));
      sorted = std::move(beam);
    }

    std::vector<ClassSet> groups;
    std::vector<bool> subset_admitted(sorted.size(), false);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      groups.push_back(sorted[i].first);
      if (mode == CheckingMode::monotonic) {
        subset_admitted[i] = std::any_of(admitted.begin(), admitted.end(),
                                         [&](const ClassSet& h) { return h.is_proper_subset_of(groups[i]); });
      }
    }
    const auto verdicts =
        detail::assess(groups, rs, log, mode, subset_admitted, deadline, opts.threads, result.truncated);

    std::vector<const Path*> expand;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const auto& a = verdicts[i];
      if (a.checked) ++result.groups_checked;
      if (a.admitted) {
        admitted.push_back(groups[i]);
        result.candidates.insert(groups[i], Provenance::dfg_path, a.checked);
      }
      if (result.truncated) continue;
      if (mode != CheckingMode::anti_monotonic || a.admitted || a.expandable) expand.push_back(&sorted[i].second);
    }
    if (result.truncated) break;

    std::set<Path> next;
    for (const Path* p : expand) {
      const ClassSet nodes{std::vector<ClassId>(*p)};
      for (ClassId succ : dfg.successors(p->back())) {
        if (nodes.contains(succ)) continue;
        Path q = *p;
        q.push_back(succ);
        next.insert(std::move(q));
      }
      for (ClassId pred : dfg.predecessors(p->front())) {
        if (nodes.contains(pred)) continue;
        Path q{pred};
        q.insert(q.end(), p->begin(), p->end());
        next.insert(std::move(q));
      }
    }
    to_check.clear();
    for (const auto& p : next) {
      if (occurs(ClassSet{std::vector<ClassId>(p)}, log)) to_check.push_back(p);
    }
  }
  return result;
}

/// Adds merges of exclusive candidates with identical DFG pre- and post-sets,
/// plus their pre/post augmentations when both constituents' augmented forms
/// are candidates. Merged groups are checked against class-based constraints only.
inline CandidateSet merge_exclusive(const EventLog& log, const ConstraintSet& rs, const CandidateSet& cands) {
  const Dfg dfg(log);
  CandidateSet out = cands;
  PrePostIndex index(dfg);
  std::vector<ClassSet> order = cands.groups();
  for (const auto& g : order) index.add(g);

  auto add = [&](const ClassSet& g) {
    if (out.insert(g, Provenance::exclusive_merge, true)) {
      index.add(g);
      order.push_back(g);
    }
  };
  CheckOptions class_only;
  class_only.instance_based = false;

  std::set<ClassSet> seen;
  for (std::size_t n = 0; n < order.size(); ++n) {
    const ClassSet g = order[n];
    if (seen.contains(g)) continue;
    std::vector<ClassSet> equiv = index.equal_pre_post(g);
    equiv.push_back(g);
    std::sort(equiv.begin(), equiv.end());

    std::vector<std::pair<ClassSet, ClassSet>> stack;
    std::set<std::pair<ClassSet, ClassSet>> pushed;
    auto push = [&](const ClassSet& a, const ClassSet& b) {
      auto key = a < b ? std::pair{a, b} : std::pair{b, a};
      if (pushed.insert(key).second) stack.push_back(std::move(key));
    };
    for (std::size_t i = equiv.size(); i-- > 0;) {
      for (std::size_t j = equiv.size(); j-- > i + 1;) push(equiv[i], equiv[j]);
    }

    while (!stack.empty()) {
      auto [gi, gj] = std::move(stack.back());
      stack.pop_back();
      if (gi.intersects(gj) || !dfg.non_adjacent(gi, gj)) continue;
      const ClassSet gij = gi.unite(gj);
      if (!check_group(gij, rs, log, class_only).holds) continue;
      add(gij);

      const ClassSet pre = dfg.pre_set(gi);
      const ClassSet post = dfg.post_set(gi);
      const ClassSet both = pre.unite(post);
      if (out.contains(both.unite(gi)) && out.contains(both.unite(gj))) {
        add(both.unite(gij));
      } else if (out.contains(pre.unite(gi)) && out.contains(pre.unite(gj))) {
        add(pre.unite(gij));
      } else if (out.contains(post.unite(gi)) && out.contains(post.unite(gj))) {
        add(post.unite(gij));
      }

      for (const auto& gk : equiv) {
        if (gk != gi && gk != gj) push(gij, gk);
      }
      if (std::find(equiv.begin(), equiv.end(), gij) == equiv.end()) equiv.push_back(gij);
    }
    seen.insert(equiv.begin(), equiv.end());
  }
  return out;
}

}  // namespace gecco
