#include <catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"

using namespace gecco;
using namespace gecco::testing;

TEST_CASE("running example loads with eight classes in name order") {
  const auto log = running_example();
  CHECK(log.trace_count() == 4);
  CHECK(log.class_count() == 8);
  CHECK(log.event_count() == 26);
  CHECK(log.class_names() == std::vector<std::string>{"acc", "arv", "ckc", "ckt", "inf", "prio", "rcp", "rej"});
  CHECK(labels(log, trace(log, "s4")) ==
        std::vector<std::string>{"rcp", "ckc", "rej", "rcp", "ckt", "acc", "prio", "arv", "inf"});
}

TEST_CASE("class attribute lookup") {
  const auto log = running_example();
  const auto& roles = class_attribute(log, "acc", "role");
  REQUIRE(roles.size() == 1);
  CHECK(std::get<std::string>(*roles.begin()) == "manager");
  CHECK(class_attribute(log, "acc", "missing").empty());
  CHECK_THROWS_AS(class_attribute(log, "nope", "role"), UnknownClass);
}

TEST_CASE("csv errors carry the row") {
  SECTION("missing column") {
    std::istringstream in("case,class\n1,a\n");
    CHECK_THROWS_AS(read_csv(in), ParseError);
  }
  SECTION("bad timestamp") {
    std::istringstream in("case,class,time\n1,a,0\n1,b,yesterday\n");
    try {
      read_csv(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 3);
    }
  }
  SECTION("negative timestamp") {
    std::istringstream in("case,class,time\n1,a,-5\n");
    CHECK_THROWS_AS(read_csv(in), ParseError);
  }
  SECTION("ragged row") {
    std::istringstream in("case,class,time\n1,a,0,extra\n");
    CHECK_THROWS_AS(read_csv(in), ParseError);
  }
  SECTION("header only") {
    std::istringstream in("case,class,time\n");
    CHECK_THROWS_AS(read_csv(in), EmptyLog);
  }
}

TEST_CASE("csv honours column mapping and quoting") {
  std::istringstream in("id,activity,ts,note\n"
                        "\"c,1\",\"say \"\"hi\"\"\",2024-01-01T00:00:00Z,\"multi\nline\"\n"
                        "\"c,1\",b,2024-01-01T00:01:00+01:00,\n");
  const auto log = read_csv(in, ColumnMap{"id", "activity", "ts"});
  REQUIRE(log.trace_count() == 1);
  const auto& t = log.traces()[0];
  CHECK(t.id == "c,1");
  // The +01:00 event is earlier in UTC, so it sorts first.
  CHECK(labels(log, t) == std::vector<std::string>{"b", "say \"hi\""});
  CHECK(std::get<std::string>(t.events[1].attrs.at("note")) == "multi\nline");
  CHECK(!t.events[0].attrs.contains("note"));
}

TEST_CASE("jsonl reading") {
  std::istringstream in(R"({"case": 7, "class": "a", "time": 1000, "cost": 3, "w": 1.5, "ok": true})"
                        "\n\n"
                        R"({"case": "7", "class": "b", "time": "1970-01-01T00:00:02Z"})"
                        "\n");
  const auto log = read_jsonl(in);
  REQUIRE(log.trace_count() == 1);
  const auto& e = log.traces()[0].events[0];
  CHECK(std::get<std::int64_t>(e.attrs.at("cost")) == 3);
  CHECK(std::get<double>(e.attrs.at("w")) == 1.5);
  CHECK(std::get<std::string>(e.attrs.at("ok")) == "true");
  CHECK(log.traces()[0].events[1].time.millis == 2000);

  std::istringstream nested(R"({"case": 1, "class": "a", "time": 0, "x": [1]})");
  CHECK_THROWS_AS(read_jsonl(nested), ParseError);
  std::istringstream missing(R"({"case": 1, "time": 0})");
  CHECK_THROWS_AS(read_jsonl(missing), ParseError);
}

TEST_CASE("round trip through csv and jsonl") {
  EventLog::Builder b;
  Attributes a1;
  a1.emplace("cost", std::int64_t{5});
  a1.emplace("ratio", 0.25);
  a1.emplace("who", std::string("ann"));
  a1.emplace("due", Timestamp{86400000});
  b.add("x", "a", Timestamp{0}, a1);
  Attributes a2;
  a2.emplace("ratio", 2.0);
  b.add("x", "b", Timestamp{1500}, a2);
  b.add("y", "a", Timestamp{3000});
  const auto log = std::move(b).build();

  for (auto fmt : {LogFormat::csv, LogFormat::jsonl}) {
    std::stringstream buf;
    if (fmt == LogFormat::csv) write_csv(log, buf);
    else write_jsonl(log, buf);
    const auto back = fmt == LogFormat::csv ? read_csv(buf) : read_jsonl(buf);
    CHECK(back == log);
  }
}

TEST_CASE("iso-8601 parsing and formatting") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z")->millis == 0);
  CHECK(parse_iso8601("1970-01-01 00:01")->millis == 60000);
  CHECK(parse_iso8601("1970-01-02T00:00:00.250+02:00")->millis == 86400000 + 250 - 7200000);
  CHECK(!parse_iso8601("tomorrow"));
  CHECK(format_iso8601(Timestamp{86400000 + 250}) == "1970-01-02T00:00:00.250Z");
}

TEST_CASE("builder rejects invalid events") {
  EventLog::Builder b;
  CHECK_THROWS_AS(b.add("c", "", Timestamp{0}), PreconditionError);
  CHECK_THROWS_AS(b.add("c", "a", Timestamp{-1}), PreconditionError);
  CHECK_THROWS_AS(EventLog::Builder{}.build(), EmptyLog);
}

TEST_CASE("events with equal timestamps keep file order") {
  std::istringstream in("case,class,time\n1,b,0\n1,a,0\n1,c,0\n");
  const auto log = read_csv(in);
  CHECK(labels(log, log.traces()[0]) == std::vector<std::string>{"b", "a", "c"});
}
