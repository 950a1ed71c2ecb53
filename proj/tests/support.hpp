#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gecco/gecco.hpp"

namespace gecco::testing {

inline std::string fixture(const std::string& name) { return std::string(GECCO_FIXTURES) + "/" + name; }

/// The four-trace request handling log, timestamps 10 minutes apart.
inline EventLog running_example() { return load_log(fixture("running_example.csv"), LogFormat::csv); }

inline ConstraintSet role_constraint() { return parse_constraints("instance distinct(role) <= 1\n"); }

inline const Trace& trace(const EventLog& log, const std::string& id) {
  for (const auto& t : log.traces()) {
    if (t.id == id) return t;
  }
  throw std::out_of_range(id);
}

inline std::vector<std::string> labels(const EventLog& log, const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) out.push_back(log.class_name(e.cls));
  return out;
}

inline EventLog log_of(std::initializer_list<std::initializer_list<std::string_view>> traces) {
  EventLog::Builder b;
  int i = 0;
  for (auto t : traces) b.add_trace("t" + std::to_string(++i), t);
  return std::move(b).build();
}

inline std::vector<ClassSet> groups_of(const EventLog& log, std::initializer_list<std::initializer_list<std::string_view>> gs) {
  std::vector<ClassSet> out;
  for (auto g : gs) out.push_back(log.classes_of(g));
  std::sort(out.begin(), out.end());
  return out;
}

/// Random fuzz logs: 2-8 classes c0..c7 with a class-level role r0..r2,
/// 3-12 traces of 1-10 events, 1-600 s between events, integer cost 0-100.
struct RandomLog {
  EventLog log;
  std::vector<std::string> class_pool;
};

inline RandomLog random_log(std::mt19937_64& rng) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = uniform(2, 8);
  std::vector<std::string> classes, roles;
  for (int c = 0; c < n; ++c) {
    classes.push_back("c" + std::to_string(c));
    roles.push_back("r" + std::to_string(uniform(0, 2)));
  }
  EventLog::Builder b;
  const int traces = uniform(3, 12);
  for (int t = 0; t < traces; ++t) {
    std::int64_t time = 0;
    const int len = uniform(1, 10);
    for (int i = 0; i < len; ++i) {
      time += 1000LL * uniform(1, 600);
      const int c = uniform(0, n - 1);
      Attributes attrs;
      attrs.emplace("role", roles[c]);
      attrs.emplace("cost", static_cast<std::int64_t>(uniform(0, 100)));
      b.add("case" + std::to_string(t), classes[c], Timestamp{time}, std::move(attrs));
    }
  }
  return {std::move(b).build(), classes};
}

/// 0-3 constraints drawn from the whole constraint language, as a document.
inline std::string random_constraints(std::mt19937_64& rng, const std::vector<std::string>& classes) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto cmp = [&] { return uniform(0, 1) ? "<=" : ">="; };
  auto cls = [&] { return classes[static_cast<std::size_t>(uniform(0, static_cast<int>(classes.size()) - 1))]; };
  auto instance_body = [&]() -> std::string {
    switch (uniform(0, 6)) {
      case 0: return std::string("instance distinct(role) ") + cmp() + " " + std::to_string(uniform(1, 2));
      case 1: return std::string("instance sum(cost) ") + cmp() + " " + std::to_string(uniform(0, 300));
      case 2: return std::string("instance avg(cost) ") + cmp() + " " + std::to_string(uniform(0, 100));
      case 3: return "instance duration <= " + std::to_string(uniform(60, 3000));
      case 4: return "instance maxgap <= " + std::to_string(uniform(60, 1200));
      case 5: return "instance perclass <= " + std::to_string(uniform(1, 2));
      default: return "instance distinct(role) <= 1";
    }
  };
  std::ostringstream doc;
  const int count = uniform(0, 3);
  for (int i = 0; i < count; ++i) {
    switch (uniform(0, 7)) {
      case 0: doc << "grouping count " << cmp() << " " << uniform(1, static_cast<int>(classes.size())); break;
      case 1: doc << "class count " << cmp() << " " << uniform(1, 4); break;
      case 2: doc << "class cannot-link " << cls() << " " << cls(); break;
      case 3: doc << "class must-link " << cls() << " " << cls(); break;
      case 4: doc << "class distinct(role) <= " << uniform(1, 2); break;
      case 5: {
        static const char* q[] = {"0.5", "0.8", "0.95"};
        doc << "atleast " << q[uniform(0, 2)] << ": " << instance_body();
        break;
      }
      default: doc << instance_body(); break;
    }
    doc << '\n';
  }
  return doc.str();
}

}  // namespace gecco::testing
