#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace gecco;
using namespace gecco::testing;

TEST_CASE("size reduction") {
  const auto log = running_example();
  const auto groups = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK(size_reduction(groups, log) == 0.5);
  std::vector<ClassSet> singletons;
  for (ClassId c = 0; c < log.class_count(); ++c) singletons.push_back(ClassSet::singleton(c));
  CHECK(size_reduction(singletons, log) == 0.0);
  CHECK_THROWS_AS(size_reduction(std::vector<ClassSet>{log.classes_of({"acc"})}, log), NotACover);
}

TEST_CASE("dfg edge reduction") {
  const auto log = running_example();
  const auto groups = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  const auto out = abstract_log(log, groups, AbstractionStrategy::completion_only);
  // Abstracted edges: G1->acc, G1->rej, rej->G1, rej->G2, acc->G2.
  CHECK(Dfg(out).edge_count() == 5);
  CHECK(dfg_edge_reduction(log, out) == Catch::Approx(1.0 - 5.0 / 14.0).margin(1e-12));
  const auto flat = log_of({{"a"}, {"b"}});
  CHECK(dfg_edge_reduction(flat, flat) == 0.0);
}

TEST_CASE("silhouette matches the textbook definition") {
  const auto log = running_example();
  const auto groups = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK(silhouette(groups, log) == Catch::Approx(oracle::silhouette(log, groups)).margin(1e-12));
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    const auto r = random_log(rng);
    const auto n = r.log.class_count();
    if (n < 2) continue;
    std::vector<std::vector<ClassId>> parts(std::uniform_int_distribution<std::size_t>(2, n)(rng));
    for (ClassId c = 0; c < n; ++c) parts[c < parts.size() ? c : rng() % parts.size()].push_back(c);
    std::vector<ClassSet> groups_r;
    for (auto& p : parts) groups_r.emplace_back(p);
    std::sort(groups_r.begin(), groups_r.end());
    const double s = silhouette(groups_r, r.log);
    CHECK(s == Catch::Approx(oracle::silhouette(r.log, groups_r)).margin(1e-9));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("silhouette needs two groups") {
  const auto log = log_of({{"a", "b"}});
  CHECK_THROWS_AS(silhouette(groups_of(log, {{"a", "b"}}), log), TooFewGroups);
  CHECK(silhouette(groups_of(log, {{"a"}, {"b"}}), log) == 0.0);
}

TEST_CASE("quality report") {
  const auto log = running_example();
  const auto groups = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  const auto out = abstract_log(log, groups, AbstractionStrategy::completion_only);
  const auto q = quality_report(log, groups, out);
  CHECK(q.group_count == 4);
  CHECK(q.class_count == 8);
  CHECK(q.silhouette.has_value());
  const auto all = groups_of(log, {{"rcp", "ckc", "ckt", "acc", "rej", "prio", "inf", "arv"}});
  CHECK(!quality_report(log, all, abstract_log(log, all, AbstractionStrategy::completion_only)).silhouette);
}
