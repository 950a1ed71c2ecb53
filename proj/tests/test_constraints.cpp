#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace gecco;
using namespace gecco::testing;

TEST_CASE("parser accepts every constraint form") {
  const auto rs = parse_constraints(R"(# comment line
grouping count <= 4
grouping count >= 2   # trailing comment
class count <= 3
class cannot-link acc "rej"
class must-link "two words" b
class distinct(role) <= 1
instance distinct(role) >= 1
instance sum(cost) <= 100
instance avg(cost) >= 2.5
instance duration <= 3600
instance maxgap <= 60
instance perclass <= 2
atleast 0.95: instance distinct(role) <= 1
)");
  REQUIRE(rs.size() == 13);
  CHECK(rs.grouping().size() == 2);
  CHECK(rs.class_based().size() == 4);
  CHECK(rs.instance_based().size() == 7);
  CHECK(rs.max_groups() == 4u);
  CHECK(rs.min_groups() == 2u);
  CHECK(rs.instance_options().max_repeats == 2);
  const auto* ml = rs.all()[4].as<rule::MustLink>();
  REQUIRE(ml);
  CHECK(ml->first == "two words");
}

TEST_CASE("canonical text parses back to the same constraint") {
  const std::string doc =
      "grouping count >= 2\nclass count <= 3\nclass cannot-link acc \"a b\"\nclass distinct(role) <= 1\n"
      "instance sum(cost) >= 12.5\ninstance duration <= 90\natleast 0.8: instance maxgap <= 30\n";
  const auto rs = parse_constraints(doc);
  std::string again;
  for (const auto& c : rs.all()) again += c.text() + "\n";
  CHECK(again == doc);
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_constraints("class count <= 2\ninstance bogus <= 1\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 10);
  }
  CHECK_THROWS_AS(parse_constraints("class count = 2"), SyntaxError);
  CHECK_THROWS_AS(parse_constraints("class count <= two"), SyntaxError);
  CHECK_THROWS_AS(parse_constraints("instance duration >= 5"), SyntaxError);
  CHECK_THROWS_AS(parse_constraints("class count <= 2 extra"), SyntaxError);
  CHECK_THROWS_AS(parse_constraints("class distinct(role <= 1"), SyntaxError);
  CHECK_THROWS_AS(parse_constraints("class must-link \"open"), SyntaxError);
}

TEST_CASE("semantic errors") {
  CHECK_THROWS_AS(parse_constraints("class count <= -1"), SemanticError);
  CHECK_THROWS_AS(parse_constraints("instance perclass <= 0"), SemanticError);
  CHECK_THROWS_AS(parse_constraints("atleast 1.5: instance maxgap <= 3"), SemanticError);
  CHECK_THROWS_AS(parse_constraints("atleast 0.5: class count <= 3"), SemanticError);
  CHECK_THROWS_AS(parse_constraints("instance sum(cost) <= -3"), SemanticError);
}

TEST_CASE("monotonicity classes") {
  auto m = [](const char* text) { return monotonicity(parse_constraints(text).all().at(0)); };
  CHECK(m("class count >= 2") == Monotonicity::monotonic);
  CHECK(m("instance distinct(x) >= 2") == Monotonicity::monotonic);
  CHECK(m("instance sum(x) >= 2") == Monotonicity::monotonic);
  CHECK(m("class count <= 2") == Monotonicity::anti_monotonic);
  CHECK(m("class cannot-link a b") == Monotonicity::anti_monotonic);
  CHECK(m("class distinct(x) <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("instance distinct(x) <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("instance sum(x) <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("instance duration <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("instance maxgap <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("instance perclass <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("atleast 0.9: instance duration <= 1") == Monotonicity::anti_monotonic);
  CHECK(m("class must-link a b") == Monotonicity::non_monotonic);
  CHECK(m("instance avg(x) <= 1") == Monotonicity::non_monotonic);
  CHECK(m("atleast 0.9: instance sum(x) >= 1") == Monotonicity::non_monotonic);
  CHECK(m("grouping count <= 1") == Monotonicity::not_applicable);
}

TEST_CASE("checking mode") {
  CHECK(checking_mode(parse_constraints("")) == CheckingMode::monotonic);
  CHECK(checking_mode(parse_constraints("grouping count <= 3")) == CheckingMode::monotonic);
  CHECK(checking_mode(parse_constraints("class count >= 2")) == CheckingMode::monotonic);
  CHECK(checking_mode(parse_constraints("class count >= 2\nclass count <= 4")) == CheckingMode::anti_monotonic);
  CHECK(checking_mode(parse_constraints("class must-link a b")) == CheckingMode::non_monotonic);
  CHECK(checking_mode(parse_constraints("class must-link a b\nclass cannot-link a c")) ==
        CheckingMode::anti_monotonic);
}

TEST_CASE("role constraint on the running example") {
  const auto log = running_example();
  const auto rs = role_constraint();
  CHECK(holds_group(log.classes_of({"rcp", "ckc", "ckt"}), rs, log).holds);
  CHECK(holds_group(log.classes_of({"prio", "inf", "arv"}), rs, log).holds);
  CHECK(holds_group(log.classes_of({"acc", "rej"}), rs, log).holds);
  // s4 splits into <rcp> and <rcp, acc>; s2 has a lone rcp.
  const auto v = holds_group(log.classes_of({"rcp", "acc"}), rs, log);
  REQUIRE(!v.holds);
  REQUIRE(v.violations.size() == 1);
  const auto& why = v.violations[0];
  CHECK(why.scope == Scope::instance_based);
  CHECK(why.violating_instances == 3);
  CHECK(why.total_instances == 5);
  CHECK(why.violating_cases == 3);
  CHECK(why.total_cases == 4);
  CHECK(v.violates_anti_monotonic());
}

TEST_CASE("class-based constraints") {
  const auto log = running_example();
  const auto rs = parse_constraints("class cannot-link acc rej\nclass must-link inf arv\nclass count <= 3");
  CHECK(holds_group(log.classes_of({"acc"}), rs, log).holds);
  CHECK(!holds_group(log.classes_of({"acc", "rej"}), rs, log).holds);
  CHECK(!holds_group(log.classes_of({"inf"}), rs, log).holds);
  CHECK(holds_group(log.classes_of({"inf", "arv"}), rs, log).holds);
  CHECK(!holds_group(log.classes_of({"inf", "arv", "prio", "rcp"}), rs, log).holds);
  CHECK(holds_group(log.classes_of({"acc"}), parse_constraints("class distinct(role) <= 1"), log).holds);
  CHECK(!holds_group(log.classes_of({"acc", "rcp"}), parse_constraints("class distinct(role) <= 1"), log).holds);
}

TEST_CASE("full check reports every violation") {
  const auto log = running_example();
  const auto rs = parse_constraints("class count <= 1\ninstance distinct(role) <= 1");
  CheckOptions all;
  all.short_circuit = false;
  const auto v = check_group(log.classes_of({"acc", "rcp"}), rs, log, all);
  CHECK(v.violations.size() == 2);
  CheckOptions class_only;
  class_only.instance_based = false;
  CHECK(check_group(log.classes_of({"acc", "rcp"}), rs, log, class_only).violations.size() == 1);
}

TEST_CASE("instance aggregates") {
  EventLog::Builder b;
  auto ev = [&](const char* c, std::int64_t t, std::optional<std::int64_t> cost) {
    Attributes a;
    if (cost) a.emplace("cost", *cost);
    b.add("1", c, Timestamp{t * 1000}, std::move(a));
  };
  ev("a", 0, 10);
  ev("x", 30, std::nullopt);
  ev("b", 100, 30);
  ev("c", 400, std::nullopt);
  const auto log = std::move(b).build();
  const auto ab = log.classes_of({"a", "b"});
  auto holds = [&](const char* text, const ClassSet& g) { return holds_group(g, parse_constraints(text), log).holds; };
  CHECK(holds("instance sum(cost) <= 40", ab));
  CHECK(!holds("instance sum(cost) <= 39", ab));
  CHECK(holds("instance avg(cost) >= 20", ab));
  CHECK(!holds("instance avg(cost) >= 21", ab));
  CHECK(holds("instance duration <= 100", ab));
  CHECK(!holds("instance duration <= 99", ab));
  CHECK(holds("instance maxgap <= 100", ab));
  CHECK(!holds("instance maxgap <= 99", ab));
  CHECK(holds("instance distinct(cost) >= 2", ab));
  CHECK(holds("instance sum(cost) <= 40", log.classes_of({"a", "b", "c"})));
  // Attribute carried by no class of the group is a violation.
  const auto v = holds_group(ab, parse_constraints("instance sum(weight) <= 5"), log);
  REQUIRE(!v.holds);
  CHECK(v.violations[0].unknown_attribute);
}

TEST_CASE("instances without values fail min-style and pass max-style aggregates") {
  EventLog::Builder b;
  Attributes cost;
  cost.emplace("cost", std::int64_t{30});
  b.add("1", "b", Timestamp{0}, cost);
  b.add("2", "b", Timestamp{0});
  const auto log = std::move(b).build();
  const auto g = log.classes_of({"b"});
  CHECK(!holds_group(g, parse_constraints("instance sum(cost) >= 1"), log).holds);
  CHECK(holds_group(g, parse_constraints("instance sum(cost) <= 30"), log).holds);
  CHECK(!holds_group(g, parse_constraints("instance distinct(cost) >= 1"), log).holds);
  CHECK(holds_group(g, parse_constraints("instance avg(cost) <= 30"), log).holds);
}

TEST_CASE("perclass splitting and coverage") {
  const auto log = log_of({{"a", "b", "a", "b"}, {"a", "a"}});
  const auto ab = log.classes_of({"a", "b"});
  CHECK(instances(log, ab, parse_constraints("").instance_options()).size() == 4);
  const auto rs = parse_constraints("instance perclass <= 2");
  CHECK(instances(log, ab, rs.instance_options()).size() == 2);
  CHECK(holds_group(ab, rs, log).holds);
  // The two instances of the first trace span a minute, those of the second none.
  CHECK(holds_group(ab, parse_constraints("atleast 0.5: instance duration <= 59"), log).holds);
  CHECK(!holds_group(ab, parse_constraints("atleast 0.75: instance duration <= 59"), log).holds);
  CHECK(!holds_group(ab, parse_constraints("instance duration <= 59"), log).holds);
}

TEST_CASE("validation rejects sums over negative values") {
  std::istringstream in("case,class,time,cost\n1,a,0,-3\n1,b,1,4\n");
  const auto log = read_csv(in);
  CHECK_THROWS_AS(parse_constraints("instance sum(cost) >= 1").validate(log), SemanticError);
  CHECK_NOTHROW(parse_constraints("instance avg(cost) >= 1").validate(log));
}

TEST_CASE("grouping-level evaluation") {
  const auto log = running_example();
  const auto rs = parse_constraints("grouping count <= 4\ninstance distinct(role) <= 1");
  const auto four = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK(holds_grouping(four, rs, log).holds);
  const auto too_many = groups_of(log, {{"rcp"}, {"ckc", "ckt"}, {"acc"}, {"rej"}, {"prio", "inf", "arv"}});
  const auto v = holds_grouping(too_many, rs, log);
  CHECK(!v.holds);
  CHECK(v.grouping_violations.size() == 1);
  const auto overlap = groups_of(log, {{"rcp", "ckc", "ckt"}, {"acc", "ckc"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK_THROWS_AS(holds_grouping(overlap, rs, log), NotAPartition);
  const auto gap = groups_of(log, {{"rcp", "ckc", "ckt"}, {"rej"}, {"prio", "inf", "arv"}});
  CHECK_THROWS_AS(holds_grouping(gap, rs, log), NotAPartition);
}
