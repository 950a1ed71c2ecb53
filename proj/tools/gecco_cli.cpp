#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gecco/gecco.hpp"

namespace fs = std::filesystem;
using namespace gecco;

namespace {

enum Exit { exit_ok = 0, exit_config = 1, exit_infeasible = 2, exit_timeout = 3 };

struct LogArgs {
  std::string path;
  std::string format;
  ColumnMap cols;
};

struct SearchArgs {
  std::string constraints;
  std::string engine = "exh";
  std::optional<std::size_t> beam;
  double timeout = 18000;
  std::size_t threads = 0;
};

struct OutArgs {
  std::string out;
  std::string strategy = "complete";
  std::optional<std::string> name_attr;
};

void add_log_options(CLI::App* cmd, LogArgs& a) {
  cmd->add_option("--log", a.path, "Event log (CSV or JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", a.format, "csv or jsonl (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--case-col", a.cols.case_col, "Case id column")->capture_default_str();
  cmd->add_option("--class-col", a.cols.class_col, "Event class column")->capture_default_str();
  cmd->add_option("--time-col", a.cols.time_col, "Timestamp column")->capture_default_str();
}

void add_search_options(CLI::App* cmd, SearchArgs& a, bool engine) {
  cmd->add_option("--constraints", a.constraints, "Constraint document")->check(CLI::ExistingFile);
  if (engine) {
    cmd->add_option("--engine", a.engine, "exh, dfg (unlimited beam) or dfg-k")
        ->check(CLI::IsMember({"exh", "dfg", "dfg-k"}))
        ->capture_default_str();
    cmd->add_option("--beam", a.beam, "Beam width for dfg-k (default 5 * classes)")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--timeout", a.timeout, "Seconds per search stage")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
}

void add_output_options(CLI::App* cmd, OutArgs& a) {
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--strategy", a.strategy, "complete or start-complete")
      ->check(CLI::IsMember({"complete", "start-complete"}))
      ->capture_default_str();
  cmd->add_option("--name-attr", a.name_attr, "Attribute whose shared value prefixes activity names");
}

LogFormat format_of(const LogArgs& a) {
  if (a.format == "csv") return LogFormat::csv;
  if (a.format == "jsonl") return LogFormat::jsonl;
  return format_from_path(a.path);
}

EventLog load(const LogArgs& a) { return load_log(a.path, format_of(a), a.cols); }

ConstraintSet constraints_of(const SearchArgs& a, const EventLog& log) {
  ConstraintSet rs = a.constraints.empty() ? ConstraintSet{} : load_constraints(a.constraints);
  rs.validate(log);
  return rs;
}

PipelineOptions pipeline_options(const SearchArgs& s, const OutArgs* o) {
  PipelineOptions p;
  p.engine = s.engine == "exh" ? Engine::exhaustive : s.engine == "dfg" ? Engine::dfg_unlimited : Engine::dfg_beam;
  p.beam = s.beam;
  p.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(s.timeout * 1000.0)));
  p.threads = s.threads;
  if (o) {
    p.strategy = o->strategy == "complete" ? AbstractionStrategy::completion_only
                                           : AbstractionStrategy::start_and_complete;
    p.name_attribute = o->name_attr;
  }
  return p;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Opens `path` for writing, or returns std::cout for "" and "-".
struct Sink {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path);
    stream = &file;
  }
};

int emit_pipeline(const PipelineResult& r, const EventLog& log, const LogArgs& la, const OutArgs& oa) {
  const fs::path dir(oa.out);
  fs::create_directories(dir);
  const LogFormat fmt = format_of(la);
  const std::string ext = fmt == LogFormat::csv ? ".csv" : ".jsonl";
  write_log(r.output, dir / ("abstracted" + ext), fmt, la.cols);
  export_dot(Dfg(log), dir / "original.dot");

  if (r.status == PipelineStatus::infeasible) {
    write_json(dir / "infeasibility.json", infeasibility_json(*r.infeasibility));
    std::cerr << "infeasible: no grouping satisfies the constraints; wrote the original log and "
              << (dir / "infeasibility.json").string() << '\n';
    return exit_infeasible;
  }
  if (r.status == PipelineStatus::timeout) {
    std::cerr << "timeout: solver found no grouping within the time limit; wrote the original log\n";
    return exit_timeout;
  }
  export_dot(Dfg(r.output), dir / "abstracted.dot");
  write_json(dir / "grouping.json", grouping_json(log, *r.grouping, r.solve.status));
  write_json(dir / "names.json", activity_names_json(log, r.names));
  write_json(dir / "quality.json", quality_json(*r.quality));
  if (r.search.truncated) std::cerr << "warning: candidate search timed out; used candidates found so far\n";
  if (r.solve.status == SolveStatus::feasible) std::cerr << "warning: solver timed out; grouping is not proven optimal\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-driven event log abstraction"};
  app.require_subcommand(1);

  LogArgs la;
  SearchArgs sa;
  OutArgs oa;
  std::string candidates_path;
  std::string grouping_path;
  std::string out_file;
  double keep = 1.0;

  auto* abstract = app.add_subcommand("abstract", "Compute candidates, select a grouping, write the abstracted log");
  add_log_options(abstract, la);
  add_search_options(abstract, sa, true);
  add_output_options(abstract, oa);

  auto* candidates = app.add_subcommand("candidates", "Write candidate groups as JSONL");
  add_log_options(candidates, la);
  add_search_options(candidates, sa, true);
  candidates->add_option("--out", out_file, "Output file (default: stdout)");

  auto* solve = app.add_subcommand("solve", "Select a grouping from a candidates JSONL file and abstract");
  add_log_options(solve, la);
  add_search_options(solve, sa, false);
  add_output_options(solve, oa);
  solve->add_option("--candidates", candidates_path, "Candidates JSONL")->required()->check(CLI::ExistingFile);

  auto* dfg = app.add_subcommand("dfg", "Write the directly-follows graph as DOT");
  add_log_options(dfg, la);
  dfg->add_option("--out", out_file, "Output file (default: stdout)");
  dfg->add_option("--keep", keep, "Fraction of most frequent edges to keep")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* metrics = app.add_subcommand("metrics", "Quality measures of a grouping");
  add_log_options(metrics, la);
  metrics->add_option("--grouping", grouping_path, "Grouping JSON ({\"groups\": [[...]]})")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--strategy", oa.strategy, "complete or start-complete")
      ->check(CLI::IsMember({"complete", "start-complete"}))
      ->capture_default_str();
  metrics->add_option("--out", out_file, "Output file (default: stdout)");

  auto* diag = app.add_subcommand("diagnose", "Explain why no grouping satisfies the constraints");
  add_log_options(diag, la);
  add_search_options(diag, sa, true);
  diag->add_option("--out", out_file, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    const EventLog log = load(la);

    if (*dfg) {
      if (!(keep > 0.0)) throw PreconditionError("--keep must lie in (0, 1]");
      Sink sink(out_file);
      export_dot(Dfg(log), *sink.stream, keep);
      return exit_ok;
    }

    if (*metrics) {
      std::ifstream in(grouping_path, std::ios::binary);
      const auto groups = read_grouping_json(in, log);
      const auto strategy = oa.strategy == "complete" ? AbstractionStrategy::completion_only
                                                      : AbstractionStrategy::start_and_complete;
      const auto abstracted = abstract_log(log, groups, strategy);
      Sink sink(out_file);
      *sink.stream << quality_json(quality_report(log, groups, abstracted)).dump(2) << '\n';
      return exit_ok;
    }

    const ConstraintSet rs = constraints_of(sa, log);
    const PipelineOptions opts = pipeline_options(sa, (*abstract || *solve) ? &oa : nullptr);

    if (*candidates) {
      const auto result = compute_candidates(log, rs, opts);
      Sink sink(out_file);
      write_candidates_jsonl(*sink.stream, log, result.candidates, DistanceCache(log, rs.instance_options()));
      if (result.truncated) std::cerr << "warning: candidate search timed out; output is partial\n";
      return exit_ok;
    }

    if (*diag) {
      const auto search = compute_candidates(log, rs, opts);
      CoverProblem problem;
      problem.class_count = log.class_count();
      if (!search.candidates.empty()) problem = CoverProblem::build(log, search.candidates, rs, opts.threads);
      const bool feasible = !problem.groups.empty() && solve_exact(problem, opts.timeout).grouping.has_value();
      Sink sink(out_file);
      if (feasible) {
        *sink.stream << Json{{"feasible", true}}.dump(2) << '\n';
        return exit_ok;
      }
      Json j{{"feasible", false}};
      j["report"] = infeasibility_json(diagnose(problem, rs, log, opts.timeout));
      *sink.stream << j.dump(2) << '\n';
      return exit_infeasible;
    }

    if (*solve) {
      std::ifstream in(candidates_path, std::ios::binary);
      SearchResult search;
      search.candidates = read_candidates_jsonl(in, log);
      return emit_pipeline(solve_and_abstract(log, rs, std::move(search), opts), log, la, oa);
    }

    return emit_pipeline(run_pipeline(log, rs, opts), log, la, oa);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const SyntaxError& e) {
    std::cerr << "constraint syntax error: " << e.what() << '\n';
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return exit_config;
}
