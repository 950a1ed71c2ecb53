#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace gecco;
using namespace gecco::testing;

namespace {

std::vector<std::vector<std::string>> instance_labels(const EventLog& log, const std::vector<GroupInstance>& xs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& xi : xs) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i < xi.size(); ++i) row.push_back(log.class_name(xi.event(i).cls));
    out.push_back(row);
  }
  return out;
}

}  // namespace

TEST_CASE("a repeated class starts a new instance") {
  const auto log = running_example();
  const auto xs = instances(trace(log, "s4"), log.classes_of({"rcp", "ckc", "ckt"}));
  CHECK(instance_labels(log, xs) == std::vector<std::vector<std::string>>{{"rcp", "ckc"}, {"rcp", "ckt"}});
  CHECK(xs[0].span() == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(xs[1].span() == std::pair<std::size_t, std::size_t>{3, 4});
}

TEST_CASE("raising the repeat limit keeps repeats together") {
  const auto log = running_example();
  const auto xs = instances(trace(log, "s4"), log.classes_of({"rcp", "ckc", "ckt"}), InstanceOptions{2});
  CHECK(instance_labels(log, xs) == std::vector<std::vector<std::string>>{{"rcp", "ckc", "rcp", "ckt"}});
}

TEST_CASE("interrupts count foreign events inside the span") {
  const auto log = log_of({{"a", "b", "c", "d", "e"}});
  const auto xs = instances(log, log.classes_of({"a", "e"}));
  REQUIRE(xs.size() == 1);
  CHECK(interrupts(xs[0]) == 3);
  CHECK(missing(xs[0], log.classes_of({"a", "e"})) == 0);
}

TEST_CASE("missing counts absent classes") {
  const auto log = log_of({{"a", "b"}, {"a"}});
  const auto g = log.classes_of({"a", "b"});
  const auto xs = instances(log, g);
  REQUIRE(xs.size() == 2);
  CHECK(missing(xs[0], g) == 0);
  CHECK(missing(xs[1], g) == 1);
  // (0 + 0 + 1/2 + 0 + 1/2 + 1/2) / 2
  CHECK(group_distance(log, g) == Catch::Approx(0.75).epsilon(0));
}

TEST_CASE("running example distances") {
  const auto log = running_example();
  CHECK(group_distance(log, log.classes_of({"rcp", "ckc", "ckt"})) == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(group_distance(log, log.classes_of({"prio", "inf", "arv"})) == Catch::Approx(5.0 / 12.0).margin(1e-12));
  CHECK(group_distance(log, log.classes_of({"acc", "rej"})) == Catch::Approx(1.125).margin(1e-12));
  CHECK(group_distance(log, log.classes_of({"ckc", "ckt"})) == Catch::Approx(1.125).margin(1e-12));
  const auto four = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK(grouping_distance(log, four) == Catch::Approx(2.0 / 3.0 + 5.0 / 12.0 + 2.0).margin(1e-12));
}

TEST_CASE("every occurring singleton has distance one") {
  const auto log = running_example();
  for (ClassId c = 0; c < log.class_count(); ++c) CHECK(group_distance(log, ClassSet::singleton(c)) == 1.0);
}

TEST_CASE("distance errors") {
  const auto log = running_example();
  CHECK_THROWS_AS(group_distance(log, ClassSet{}), PreconditionError);
  CHECK_THROWS_AS(group_distance(log, ClassSet{42}), UnknownClass);
  CHECK_THROWS_AS(grouping_distance(log, std::vector<ClassSet>{}), NotACover);
}

TEST_CASE("distance matches the direct transcription on fuzzed logs") {
  std::mt19937_64 rng(20240501);
  for (int round = 0; round < 200; ++round) {
    const auto r = random_log(rng);
    const auto& log = r.log;
    const std::size_t n = log.class_count();
    for (int k = 0; k < 3; ++k) {
      std::vector<ClassId> ids;
      std::set<std::string> names;
      for (ClassId c = 0; c < n; ++c) {
        if (std::uniform_int_distribution<int>(0, 1)(rng)) {
          ids.push_back(c);
          names.insert(log.class_name(c));
        }
      }
      if (ids.empty()) continue;
      const std::size_t repeats = 1 + static_cast<std::size_t>(k == 2);
      CHECK(group_distance(log, ClassSet(ids), InstanceOptions{repeats}) ==
            Catch::Approx(oracle::distance(log, names, repeats)).margin(1e-9));
    }
  }
}

TEST_CASE("distance cache agrees with direct computation") {
  const auto log = running_example();
  DistanceCache cache(log);
  const auto g = log.classes_of({"prio", "inf", "arv"});
  CHECK(cache(g) == group_distance(log, g));
  CHECK(cache(g) == group_distance(log, g));
}
