// Abstracts the four-trace request handling log under a role-separation constraint.

#include <iostream>

#include "gecco/gecco.hpp"

int main(int argc, char** argv) {
  using namespace gecco;
  const std::string dir = argc > 1 ? argv[1] : GECCO_SAMPLE_DIR;
  const auto log = load_log(dir + "/running_example.csv", LogFormat::csv);
  const auto rules = load_constraints(dir + "/role.gecco");

  PipelineOptions opts;
  opts.engine = Engine::dfg_unlimited;
  opts.name_attribute = "role";
  const auto result = run_pipeline(log, rules, opts);
  if (result.status != PipelineStatus::ok) {
    std::cerr << "no grouping found\n";
    return 2;
  }

  for (const auto& g : result.grouping->groups) {
    std::cout << result.names.at(g) << ":";
    for (const auto& name : log.names_of(g)) std::cout << ' ' << name;
    std::cout << "  (distance " << group_distance(log, g, rules.instance_options()) << ")\n";
  }
  std::cout << "objective " << result.grouping->objective << "\n\n";
  for (const auto& t : result.output.traces()) {
    std::cout << t.id << ":";
    for (const auto& e : t.events) std::cout << ' ' << result.output.class_name(e.cls);
    std::cout << '\n';
  }
  const auto& q = *result.quality;
  std::cout << "\nsize reduction " << q.size_reduction << ", edge reduction " << q.dfg_edge_reduction;
  if (q.silhouette) std::cout << ", silhouette " << *q.silhouette;
  std::cout << '\n';
}
