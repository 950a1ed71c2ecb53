#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "gecco/abstraction.hpp"
#include "gecco/candidates.hpp"
#include "gecco/constraints.hpp"
#include "gecco/event_log.hpp"
#include "gecco/metrics.hpp"
#include "gecco/optimizer.hpp"

namespace gecco {

enum class Engine { exhaustive, dfg_unlimited, dfg_beam };

struct PipelineOptions {
  Engine engine = Engine::exhaustive;
  /// Beam width for dfg_beam; defaults to 5 * |C_L|.
  std::optional<std::size_t> beam;
  AbstractionStrategy strategy = AbstractionStrategy::completion_only;
  std::chrono::milliseconds timeout = std::chrono::hours(5);
  std::size_t threads = 0;
  /// Attribute used to prefix default activity names.
  std::optional<std::string> name_attribute;
};

/// Step 1: candidates from the chosen engine, extended by exclusive merges.
inline SearchResult compute_candidates(const EventLog& log, const ConstraintSet& rs, const PipelineOptions& opts) {
  SearchOptions search{opts.timeout, opts.threads};
  SearchResult r;
  switch (opts.engine) {
    case Engine::exhaustive: r = exhaustive_candidates(log, rs, search); break;
    case Engine::dfg_unlimited: r = dfg_candidates(log, rs, std::nullopt, search); break;
    case Engine::dfg_beam: r = dfg_candidates(log, rs, opts.beam.value_or(default_beam_width(log)), search); break;
  }
  r.candidates = merge_exclusive(log, rs, r.candidates);
  return r;
}

enum class PipelineStatus { ok, infeasible, timeout };

struct PipelineResult {
  PipelineStatus status = PipelineStatus::ok;
  SearchResult search;
  SolveResult solve;
  std::optional<Grouping> grouping;
  std::optional<InfeasibilityReport> infeasibility;
  /// The abstracted log, or the input log unchanged when no grouping was found.
  EventLog output;
  ActivityNames names;
  std::optional<QualityReport> quality;
};

/// Steps 2 and 3 from a given candidate set.
inline PipelineResult solve_and_abstract(const EventLog& log, const ConstraintSet& rs, SearchResult search,
                                         const PipelineOptions& opts) {
  PipelineResult out;
  out.search = std::move(search);
  out.output = log;
  if (out.search.candidates.empty()) {
    out.status = PipelineStatus::infeasible;
    CoverProblem empty;
    empty.class_count = log.class_count();
    out.infeasibility = diagnose(empty, rs, log);
    return out;
  }
  const auto problem = CoverProblem::build(log, out.search.candidates, rs, opts.threads);
  out.solve = solve_exact(problem, opts.timeout);
  if (out.solve.status == SolveStatus::infeasible) {
    out.status = PipelineStatus::infeasible;
    out.infeasibility = diagnose(problem, rs, log, opts.timeout);
    return out;
  }
  if (!out.solve.grouping) {
    out.status = PipelineStatus::timeout;
    return out;
  }
  out.grouping = out.solve.grouping;
  out.names = default_names(out.grouping->groups, log, opts.name_attribute);
  out.output = abstract_log(log, *out.grouping, opts.strategy, out.names, rs.instance_options());
  out.quality = quality_report(log, out.grouping->groups, out.output);
  return out;
}

inline PipelineResult run_pipeline(const EventLog& log, const ConstraintSet& rs, const PipelineOptions& opts = {}) {
  rs.validate(log);
  return solve_and_abstract(log, rs, compute_candidates(log, rs, opts), opts);
}

}  // namespace gecco
