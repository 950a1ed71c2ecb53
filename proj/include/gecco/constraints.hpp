#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/errors.hpp"
#include "gecco/event_log.hpp"
#include "gecco/instances.hpp"

namespace gecco {

enum class Scope { grouping, class_based, instance_based };
enum class Monotonicity { monotonic, anti_monotonic, non_monotonic, not_applicable };
enum class CheckingMode { monotonic, anti_monotonic, non_monotonic };
enum class Comparison { at_most, at_least };

inline const char* to_string(Scope s) {
  switch (s) {
    case Scope::grouping: return "grouping";
    case Scope::class_based: return "class";
    case Scope::instance_based: return "instance";
  }
  return "?";
}

inline const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::monotonic: return "monotonic";
    case Monotonicity::anti_monotonic: return "anti-monotonic";
    case Monotonicity::non_monotonic: return "non-monotonic";
    case Monotonicity::not_applicable: return "n/a";
  }
  return "?";
}

inline const char* to_string(CheckingMode m) {
  switch (m) {
    case CheckingMode::monotonic: return "monotonic";
    case CheckingMode::anti_monotonic: return "anti-monotonic";
    case CheckingMode::non_monotonic: return "non-monotonic";
  }
  return "?";
}

class Constraint;

namespace rule {

struct GroupCount { Comparison cmp; std::size_t n; };
struct ClassCount { Comparison cmp; std::size_t n; };
struct CannotLink { std::string first, second; };
struct MustLink { std::string first, second; };
/// Distinct class-level values of `attr` across the group's classes, at most n.
struct ClassDistinct { std::string attr; std::size_t n; };
struct InstanceDistinct { std::string attr; Comparison cmp; std::size_t n; };
struct InstanceSum { std::string attr; Comparison cmp; double bound; };
struct InstanceAvg { std::string attr; Comparison cmp; double bound; };
struct InstanceDuration { double max_seconds; };
struct InstanceMaxGap { double max_seconds; };
struct InstancePerClass { std::size_t n; };
/// At least `fraction` of all instances of the group satisfy `inner`.
struct Coverage { double fraction; std::shared_ptr<const Constraint> inner; };

}  // namespace rule

class Constraint {
 public:
  using Rule = std::variant<rule::GroupCount, rule::ClassCount, rule::CannotLink, rule::MustLink,
                            rule::ClassDistinct, rule::InstanceDistinct, rule::InstanceSum, rule::InstanceAvg,
                            rule::InstanceDuration, rule::InstanceMaxGap, rule::InstancePerClass, rule::Coverage>;

  template <class T>
    requires std::is_constructible_v<Rule, T&&>
  Constraint(T&& r) : rule_(std::forward<T>(r)) {}  // NOLINT(google-explicit-constructor)

  const Rule& rule() const noexcept { return rule_; }

  template <class T>
  const T* as() const noexcept { return std::get_if<T>(&rule_); }

  Scope scope() const {
    if (as<rule::GroupCount>()) return Scope::grouping;
    if (as<rule::ClassCount>() || as<rule::CannotLink>() || as<rule::MustLink>() || as<rule::ClassDistinct>()) {
      return Scope::class_based;
    }
    return Scope::instance_based;
  }

  /// Attribute read by an instance-level aggregate, if any.
  std::optional<std::string> instance_attribute() const {
    if (auto* r = as<rule::InstanceDistinct>()) return r->attr;
    if (auto* r = as<rule::InstanceSum>()) return r->attr;
    if (auto* r = as<rule::InstanceAvg>()) return r->attr;
    return std::nullopt;
  }

  std::string text() const;

 private:
  Rule rule_;
};

/// Monotonicity class of a constraint under group enlargement.
inline Monotonicity monotonicity(const Constraint& c) {
  using M = Monotonicity;
  auto by_cmp = [](Comparison cmp) { return cmp == Comparison::at_least ? M::monotonic : M::anti_monotonic; };
  return std::visit(
      [&](const auto& r) -> M {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rule::GroupCount>) return M::not_applicable;
        else if constexpr (std::is_same_v<T, rule::ClassCount>) return by_cmp(r.cmp);
        else if constexpr (std::is_same_v<T, rule::CannotLink>) return M::anti_monotonic;
        else if constexpr (std::is_same_v<T, rule::MustLink>) return M::non_monotonic;
        else if constexpr (std::is_same_v<T, rule::ClassDistinct>) return M::anti_monotonic;
        else if constexpr (std::is_same_v<T, rule::InstanceDistinct>) return by_cmp(r.cmp);
        else if constexpr (std::is_same_v<T, rule::InstanceSum>) return by_cmp(r.cmp);
        else if constexpr (std::is_same_v<T, rule::InstanceAvg>) return M::non_monotonic;
        else if constexpr (std::is_same_v<T, rule::Coverage>) {
          return monotonicity(*r.inner) == M::anti_monotonic ? M::anti_monotonic : M::non_monotonic;
        } else return M::anti_monotonic;  // duration, max gap, per-class cardinality
      },
      c.rule());
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline const char* op(Comparison c) { return c == Comparison::at_most ? "<=" : ">="; }

inline std::string quote_name(const std::string& n) {
  if (n.find_first_of(" \t()<>=:#\"") == std::string::npos && !n.empty()) return n;
  std::string out = "\"";
  for (char c : n) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

inline std::string Constraint::text() const {
  using detail::format_number;
  using detail::op;
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rule::GroupCount>) {
          return std::string("grouping count ") + op(r.cmp) + " " + std::to_string(r.n);
        } else if constexpr (std::is_same_v<T, rule::ClassCount>) {
          return std::string("class count ") + op(r.cmp) + " " + std::to_string(r.n);
        } else if constexpr (std::is_same_v<T, rule::CannotLink>) {
          return "class cannot-link " + detail::quote_name(r.first) + " " + detail::quote_name(r.second);
        } else if constexpr (std::is_same_v<T, rule::MustLink>) {
          return "class must-link " + detail::quote_name(r.first) + " " + detail::quote_name(r.second);
        } else if constexpr (std::is_same_v<T, rule::ClassDistinct>) {
          return "class distinct(" + r.attr + ") <= " + std::to_string(r.n);
        } else if constexpr (std::is_same_v<T, rule::InstanceDistinct>) {
          return "instance distinct(" + r.attr + ") " + op(r.cmp) + " " + std::to_string(r.n);
        } else if constexpr (std::is_same_v<T, rule::InstanceSum>) {
          return "instance sum(" + r.attr + ") " + op(r.cmp) + " " + format_number(r.bound);
        } else if constexpr (std::is_same_v<T, rule::InstanceAvg>) {
          return "instance avg(" + r.attr + ") " + op(r.cmp) + " " + format_number(r.bound);
        } else if constexpr (std::is_same_v<T, rule::InstanceDuration>) {
          return "instance duration <= " + format_number(r.max_seconds);
        } else if constexpr (std::is_same_v<T, rule::InstanceMaxGap>) {
          return "instance maxgap <= " + format_number(r.max_seconds);
        } else if constexpr (std::is_same_v<T, rule::InstancePerClass>) {
          return "instance perclass <= " + std::to_string(r.n);
        } else {
          return "atleast " + format_number(r.fraction) + ": " + r.inner->text();
        }
      },
      rule_);
}

/// Constraints partitioned by scope. Immutable once built.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<Constraint> constraints) : all_(std::move(constraints)) {
    for (const auto& c : all_) {
      switch (c.scope()) {
        case Scope::grouping: grouping_.push_back(&c); break;
        case Scope::class_based: class_based_.push_back(&c); break;
        case Scope::instance_based: instance_based_.push_back(&c); break;
      }
    }
    auto anti_first = [](const Constraint* a, const Constraint* b) {
      return (monotonicity(*a) == Monotonicity::anti_monotonic) > (monotonicity(*b) == Monotonicity::anti_monotonic);
    };
    std::stable_sort(class_based_.begin(), class_based_.end(), anti_first);
    std::stable_sort(instance_based_.begin(), instance_based_.end(), anti_first);
  }

  ConstraintSet(const ConstraintSet& other) : ConstraintSet(other.all_) {}
  ConstraintSet& operator=(const ConstraintSet& other) {
    if (this != &other) *this = ConstraintSet(other.all_);
    return *this;
  }
  ConstraintSet(ConstraintSet&&) noexcept = default;
  ConstraintSet& operator=(ConstraintSet&&) noexcept = default;

  const std::vector<Constraint>& all() const noexcept { return all_; }
  bool empty() const noexcept { return all_.empty(); }
  std::size_t size() const noexcept { return all_.size(); }

  /// R_G, R_C, R_I. Per-group partitions list anti-monotonic constraints first.
  const std::vector<const Constraint*>& grouping() const noexcept { return grouping_; }
  const std::vector<const Constraint*>& class_based() const noexcept { return class_based_; }
  const std::vector<const Constraint*>& instance_based() const noexcept { return instance_based_; }

  /// Instance splitting implied by top-level `instance perclass <= k`.
  InstanceOptions instance_options() const {
    InstanceOptions opts;
    std::optional<std::size_t> limit;
    for (const auto* c : instance_based_) {
      if (auto* r = c->as<rule::InstancePerClass>()) limit = std::min(limit.value_or(r->n), r->n);
    }
    if (limit) opts.max_repeats = *limit;
    return opts;
  }

  std::optional<std::size_t> max_groups() const { return group_bound(Comparison::at_most); }
  std::optional<std::size_t> min_groups() const { return group_bound(Comparison::at_least); }

  /// Rejects sum constraints over attributes that take negative values in `log`.
  void validate(const EventLog& log) const {
    for (const auto& c : all_) {
      const Constraint* target = &c;
      if (auto* cov = c.as<rule::Coverage>()) target = cov->inner.get();
      const auto* sum = target->as<rule::InstanceSum>();
      if (!sum) continue;
      for (ClassId cls = 0; cls < log.class_count(); ++cls) {
        for (const auto& v : log.class_attribute(cls, sum->attr)) {
          if (auto x = numeric_value(v); x && *x < 0) {
            throw SemanticError("'" + c.text() + "': attribute '" + sum->attr +
                                "' takes negative values, sums over it are not monotone");
          }
        }
      }
    }
  }

 private:
  std::optional<std::size_t> group_bound(Comparison cmp) const {
    std::optional<std::size_t> out;
    for (const auto* c : grouping_) {
      const auto* r = c->as<rule::GroupCount>();
      if (r->cmp != cmp) continue;
      if (!out) out = r->n;
      else out = cmp == Comparison::at_most ? std::min(*out, r->n) : std::max(*out, r->n);
    }
    return out;
  }

  std::vector<Constraint> all_;
  std::vector<const Constraint*> grouping_;
  std::vector<const Constraint*> class_based_;
  std::vector<const Constraint*> instance_based_;
};

/// anti-monotonic if any per-group constraint is; monotonic if all per-group
/// constraints are (vacuously so when there are none); else non-monotonic.
inline CheckingMode checking_mode(const ConstraintSet& rs) {
  bool all_monotonic = true;
  for (const auto& c : rs.all()) {
    const auto m = monotonicity(c);
    if (m == Monotonicity::not_applicable) continue;
    if (m == Monotonicity::anti_monotonic) return CheckingMode::anti_monotonic;
    if (m != Monotonicity::monotonic) all_monotonic = false;
  }
  return all_monotonic ? CheckingMode::monotonic : CheckingMode::non_monotonic;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class ConstraintLexer {
 public:
  ConstraintLexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_no_, pos_ + 1, what); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& what) const {
    throw SyntaxError(line_no_, pos + 1, what);
  }

  /// Position of the next token.
  std::size_t mark() {
    skip_ws();
    return pos_;
  }

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }
  std::size_t column() const { return pos_ + 1; }

  std::string word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && std::string_view(" \t\r()<>=:\"").find(line_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a word");
    return std::string(line_.substr(start, pos_ - start));
  }

  void keyword(std::string_view kw) {
    skip_ws();
    const std::size_t at = pos_;
    if (word() != kw) {
      pos_ = at;
      fail("expected '" + std::string(kw) + "'");
    }
  }

  std::string name() {
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] == '"') {
      ++pos_;
      std::string out;
      while (pos_ < line_.size() && line_[pos_] != '"') {
        if (line_[pos_] == '\\' && pos_ + 1 < line_.size()) ++pos_;
        out += line_[pos_++];
      }
      if (pos_ >= line_.size()) fail("unterminated quoted name");
      ++pos_;
      if (out.empty()) fail("empty name");
      return out;
    }
    return word();
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= line_.size() || line_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parenthesised() {
    expect('(');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ')') ++pos_;
    if (pos_ >= line_.size()) fail("expected ')'");
    std::string inner(line_.substr(start, pos_ - start));
    while (!inner.empty() && (inner.back() == ' ' || inner.back() == '\t')) inner.pop_back();
    if (inner.empty()) fail("expected an attribute name");
    ++pos_;
    return inner;
  }

  Comparison comparison() {
    skip_ws();
    if (line_.substr(pos_, 2) == "<=") { pos_ += 2; return Comparison::at_most; }
    if (line_.substr(pos_, 2) == ">=") { pos_ += 2; return Comparison::at_least; }
    fail("expected '<=' or '>='");
  }

  void at_most() {
    const std::size_t at = pos_;
    if (comparison() != Comparison::at_most) {
      pos_ = at;
      skip_ws();
      fail("only '<=' is allowed here");
    }
  }

  double number() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string w = word();
    double v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || p != w.data() + w.size() || !std::isfinite(v)) {
      pos_ = at;
      fail("expected a number");
    }
    return v;
  }

  std::size_t count() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string w = word();
    long long v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || p != w.data() + w.size()) {
      pos_ = at;
      fail("expected an integer");
    }
    if (v < 0) throw SemanticError(std::to_string(line_no_) + ": negative bound " + w);
    return static_cast<std::size_t>(v);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

inline void require_non_negative(double v, std::size_t line_no) {
  if (v < 0) throw SemanticError(std::to_string(line_no) + ": negative bound " + format_number(v));
}

inline Constraint parse_instance_body(ConstraintLexer& lx) {
  const std::size_t at = lx.mark();
  const std::string what = lx.word();
  if (what == "distinct" || what == "sum" || what == "avg") {
    std::string attr = lx.parenthesised();
    const Comparison cmp = lx.comparison();
    if (what == "distinct") return rule::InstanceDistinct{std::move(attr), cmp, lx.count()};
    const double bound = lx.number();
    if (what == "sum") {
      require_non_negative(bound, lx.line_no());
      return rule::InstanceSum{std::move(attr), cmp, bound};
    }
    return rule::InstanceAvg{std::move(attr), cmp, bound};
  }
  if (what == "duration" || what == "maxgap") {
    lx.at_most();
    const double seconds = lx.number();
    require_non_negative(seconds, lx.line_no());
    if (what == "duration") return rule::InstanceDuration{seconds};
    return rule::InstanceMaxGap{seconds};
  }
  if (what == "perclass") {
    lx.at_most();
    const std::size_t n = lx.count();
    if (n < 1) throw SemanticError(std::to_string(lx.line_no()) + ": perclass bound must be at least 1");
    return rule::InstancePerClass{n};
  }
  lx.fail_at(at, "unknown instance constraint '" + what + "'");
}

inline Constraint parse_line(ConstraintLexer& lx) {
  const std::size_t at = lx.mark();
  const std::string head = lx.word();
  if (head == "grouping") {
    lx.keyword("count");
    const Comparison cmp = lx.comparison();
    return rule::GroupCount{cmp, lx.count()};
  }
  if (head == "class") {
    const std::size_t at = lx.mark();
    const std::string what = lx.word();
    if (what == "count") {
      const Comparison cmp = lx.comparison();
      return rule::ClassCount{cmp, lx.count()};
    }
    if (what == "cannot-link" || what == "must-link") {
      std::string a = lx.name();
      std::string b = lx.name();
      if (what == "cannot-link") return rule::CannotLink{std::move(a), std::move(b)};
      return rule::MustLink{std::move(a), std::move(b)};
    }
    if (what == "distinct") {
      std::string attr = lx.parenthesised();
      lx.at_most();
      return rule::ClassDistinct{std::move(attr), lx.count()};
    }
    lx.fail_at(at, "unknown class constraint '" + what + "'");
  }
  if (head == "instance") return parse_instance_body(lx);
  if (head == "atleast") {
    const double q = lx.number();
    if (!(q > 0.0 && q <= 1.0)) {
      throw SemanticError(std::to_string(lx.line_no()) + ": atleast fraction must lie in (0, 1]");
    }
    lx.expect(':');
    const std::size_t inner_at = lx.mark();
    const std::string inner_head = lx.word();
    if (inner_head == "grouping" || inner_head == "class" || inner_head == "atleast") {
      throw SemanticError(std::to_string(lx.line_no()) + ": atleast wraps only instance constraints");
    }
    if (inner_head != "instance") lx.fail_at(inner_at, "expected 'instance'");
    auto inner = std::make_shared<const Constraint>(parse_instance_body(lx));
    return rule::Coverage{q, std::move(inner)};
  }
  lx.fail_at(at, "unknown constraint '" + head + "'");
}

}  // namespace detail

/// Parses a constraint document: one constraint per line, `#` starts a comment.
inline ConstraintSet parse_constraints(std::string_view text) {
  std::vector<Constraint> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    detail::ConstraintLexer lx(line, line_no);
    if (!lx.at_end()) {
      out.push_back(detail::parse_line(lx));
      if (!lx.at_end()) lx.fail("unexpected trailing input");
    }
    start = end + 1;
  }
  return ConstraintSet(std::move(out));
}

inline ConstraintSet load_constraints(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_constraints(buf.str());
}

// ---------------------------------------------------------------------------
// Evaluation

/// Evidence for one violated constraint.
struct Violation {
  std::string constraint;
  Scope scope = Scope::class_based;
  Monotonicity monotonicity = Monotonicity::not_applicable;
  std::vector<std::string> classes;
  std::size_t violating_instances = 0;
  std::size_t total_instances = 0;
  std::size_t violating_cases = 0;
  std::size_t total_cases = 0;
  bool unknown_attribute = false;
};

struct GroupVerdict {
  bool holds = true;
  std::vector<Violation> violations;

  /// True if a violated constraint is anti-monotonic, i.e. no superset can hold.
  bool violates_anti_monotonic() const {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.monotonicity == Monotonicity::anti_monotonic; });
  }
};

struct CheckOptions {
  bool short_circuit = true;
  bool class_based = true;
  bool instance_based = true;
};

namespace detail {

inline bool class_rule_holds(const Constraint& c, const ClassSet& g, const EventLog& log) {
  auto member = [&](const std::string& name) {
    auto id = log.find_class(name);
    return id && g.contains(*id);
  };
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rule::ClassCount>) {
          return r.cmp == Comparison::at_most ? g.size() <= r.n : g.size() >= r.n;
        } else if constexpr (std::is_same_v<T, rule::CannotLink>) {
          return !(member(r.first) && member(r.second));
        } else if constexpr (std::is_same_v<T, rule::MustLink>) {
          return member(r.first) == member(r.second);
        } else if constexpr (std::is_same_v<T, rule::ClassDistinct>) {
          std::set<AttributeValue> values;
          for (ClassId cls : g) {
            const auto& vs = log.class_attribute(cls, r.attr);
            values.insert(vs.begin(), vs.end());
          }
          return values.size() <= r.n;
        } else {
          return true;
        }
      },
      c.rule());
}

/// Aggregate inputs of an instance: values of `attr` on the events that carry it.
inline std::vector<const AttributeValue*> valued(const GroupInstance& xi, const std::string& attr) {
  std::vector<const AttributeValue*> out;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto& attrs = xi.event(i).attrs;
    if (auto it = attrs.find(attr); it != attrs.end()) out.push_back(&it->second);
  }
  return out;
}

inline bool instance_rule_holds(const Constraint& c, const GroupInstance& xi) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rule::InstanceDistinct>) {
          const auto vals = valued(xi, r.attr);
          if (vals.empty()) return r.cmp == Comparison::at_most;
          std::set<AttributeValue> distinct;
          for (const auto* v : vals) distinct.insert(*v);
          return r.cmp == Comparison::at_most ? distinct.size() <= r.n : distinct.size() >= r.n;
        } else if constexpr (std::is_same_v<T, rule::InstanceSum> || std::is_same_v<T, rule::InstanceAvg>) {
          double sum = 0.0;
          std::size_t n = 0;
          for (const auto* v : valued(xi, r.attr)) {
            if (auto x = numeric_value(*v)) {
              sum += *x;
              ++n;
            }
          }
          if (n == 0) return r.cmp == Comparison::at_most;
          const double agg = std::is_same_v<T, rule::InstanceAvg> ? sum / static_cast<double>(n) : sum;
          return r.cmp == Comparison::at_most ? agg <= r.bound : agg >= r.bound;
        } else if constexpr (std::is_same_v<T, rule::InstanceDuration>) {
          const auto span = xi.event(xi.size() - 1).time.millis - xi.event(0).time.millis;
          return static_cast<double>(span) <= r.max_seconds * 1000.0;
        } else if constexpr (std::is_same_v<T, rule::InstanceMaxGap>) {
          std::int64_t gap = 0;
          for (std::size_t i = 1; i < xi.size(); ++i) {
            gap = std::max(gap, xi.event(i).time.millis - xi.event(i - 1).time.millis);
          }
          return static_cast<double>(gap) <= r.max_seconds * 1000.0;
        } else if constexpr (std::is_same_v<T, rule::InstancePerClass>) {
          std::map<ClassId, std::size_t> counts;
          for (std::size_t i = 0; i < xi.size(); ++i) {
            if (++counts[xi.event(i).cls] > r.n) return false;
          }
          return true;
        } else {
          return true;
        }
      },
      c.rule());
}

inline bool attribute_known(const std::optional<std::string>& attr, const ClassSet& g, const EventLog& log) {
  if (!attr) return true;
  return std::any_of(g.begin(), g.end(), [&](ClassId c) { return log.class_has_attribute(c, *attr); });
}

}  // namespace detail

/// Evaluates R_C then R_I (as selected by `opts`) for one group.
inline GroupVerdict check_group(const ClassSet& g, const ConstraintSet& rs, const EventLog& log,
                                CheckOptions opts = {}) {
  if (g.empty()) throw PreconditionError("group must be non-empty");
  log.require_known(g);
  GroupVerdict verdict;
  auto record = [&](const Constraint& c, Violation v) {
    v.constraint = c.text();
    v.scope = c.scope();
    v.monotonicity = monotonicity(c);
    v.classes = log.names_of(g);
    verdict.holds = false;
    verdict.violations.push_back(std::move(v));
    return opts.short_circuit;
  };

  if (opts.class_based) {
    for (const auto* c : rs.class_based()) {
      if (!detail::class_rule_holds(*c, g, log) && record(*c, {})) return verdict;
    }
  }
  if (!opts.instance_based || rs.instance_based().empty()) return verdict;

  const auto all = instances(log, g, rs.instance_options());
  std::size_t cases = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i].trace != all[i - 1].trace) ++cases;
  }
  for (const auto* c : rs.instance_based()) {
    const Constraint* target = c;
    const auto* coverage = c->as<rule::Coverage>();
    if (coverage) target = coverage->inner.get();

    Violation v;
    v.total_instances = all.size();
    v.total_cases = cases;
    if (!detail::attribute_known(target->instance_attribute(), g, log)) {
      v.unknown_attribute = true;
      v.violating_instances = all.size();
      v.violating_cases = cases;
      if (record(*c, std::move(v))) return verdict;
      continue;
    }
    const Trace* last_bad_trace = nullptr;
    for (const auto& xi : all) {
      if (!detail::instance_rule_holds(*target, xi)) {
        ++v.violating_instances;
        if (xi.trace != last_bad_trace) ++v.violating_cases;
        last_bad_trace = xi.trace;
      }
    }
    bool ok = v.violating_instances == 0;
    if (coverage && !all.empty()) {
      const double satisfied = static_cast<double>(all.size() - v.violating_instances);
      ok = satisfied + 1e-12 >= coverage->fraction * static_cast<double>(all.size());
    }
    if (!ok && record(*c, std::move(v))) return verdict;
  }
  return verdict;
}

/// holds(g, R, L) restricted to per-group constraints, short-circuiting on the first failure.
inline GroupVerdict holds_group(const ClassSet& g, const ConstraintSet& rs, const EventLog& log) {
  return check_group(g, rs, log);
}

struct GroupingVerdict {
  bool holds = true;
  std::vector<std::string> grouping_violations;
  std::vector<std::pair<ClassSet, GroupVerdict>> group_violations;
};

/// Throws NotAPartition unless `groups` is an exact cover of the log's classes.
inline void require_partition(std::span<const ClassSet> groups, const EventLog& log) {
  std::vector<int> seen(log.class_count(), 0);
  for (const auto& g : groups) {
    if (g.empty()) throw NotAPartition("grouping contains an empty group");
    log.require_known(g);
    for (ClassId c : g) {
      if (seen[c]++) throw NotAPartition("class '" + log.class_name(c) + "' is in more than one group");
    }
  }
  for (ClassId c = 0; c < seen.size(); ++c) {
    if (!seen[c]) throw NotAPartition("class '" + log.class_name(c) + "' is not covered");
  }
}

inline GroupingVerdict holds_grouping(std::span<const ClassSet> groups, const ConstraintSet& rs, const EventLog& log) {
  require_partition(groups, log);
  GroupingVerdict out;
  for (const auto* c : rs.grouping()) {
    const auto* r = c->as<rule::GroupCount>();
    const bool ok = r->cmp == Comparison::at_most ? groups.size() <= r->n : groups.size() >= r->n;
    if (!ok) {
      out.holds = false;
      out.grouping_violations.push_back(c->text());
    }
  }
  for (const auto& g : groups) {
    auto v = holds_group(g, rs, log);
    if (!v.holds) {
      out.holds = false;
      out.group_violations.emplace_back(g, std::move(v));
    }
  }
  return out;
}

}  // namespace gecco
