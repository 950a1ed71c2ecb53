#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gecco/class_set.hpp"
#include "gecco/errors.hpp"

namespace gecco {

/// UTC instant in milliseconds since the Unix epoch.
struct Timestamp {
  std::int64_t millis = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Tagged attribute value. Values of different tags never compare equal.
using AttributeValue = std::variant<std::string, std::int64_t, double, Timestamp>;
using Attributes = std::map<std::string, AttributeValue, std::less<>>;

namespace detail {

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

/// Parses `YYYY-MM-DD[(T| )HH:MM[:SS[.fff...]]][Z|(+|-)HH[:]MM]`.
/// Sub-millisecond digits are truncated. Returns nullopt on any mismatch.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::parse_digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !detail::parse_digits(s, 5, 2, mo) || !detail::parse_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  std::int64_t frac_ms = 0;
  std::int64_t offset_min = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    if (!detail::parse_digits(s, pos + 1, 2, h) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !detail::parse_digits(s, pos + 4, 2, mi)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!detail::parse_digits(s, pos + 1, 2, sec)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
          if (digits < 3) frac_ms = frac_ms * 10 + (s[pos] - '0');
          ++digits;
          ++pos;
        }
        if (digits == 0) return std::nullopt;
        for (std::size_t i = digits; i < 3; ++i) frac_ms *= 10;
      }
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' && pos + 1 == s.size()) {
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        const int sign = s[pos] == '-' ? -1 : 1;
        if (!detail::parse_digits(s, pos + 1, 2, oh)) return std::nullopt;
        std::size_t mpos = pos + 3;
        if (mpos < s.size() && s[mpos] == ':') ++mpos;
        if (!detail::parse_digits(s, mpos, 2, om) || mpos + 2 != s.size()) return std::nullopt;
        offset_min = sign * (oh * 60 + om);
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t millis = ((static_cast<std::int64_t>(days) * 24 + h) * 60 + mi - offset_min) * 60000 +
                              static_cast<std::int64_t>(sec) * 1000 + frac_ms;
  return Timestamp{millis};
}

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
inline std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const auto tp = sys_time<milliseconds>{milliseconds{ts.millis}};
  const auto dp = floor<days>(tp);
  const year_month_day ymd{dp};
  const std::int64_t ms = (tp - dp).count();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(ms / 3600000), static_cast<int>(ms / 60000 % 60),
                static_cast<int>(ms / 1000 % 60), static_cast<int>(ms % 1000));
  return buf;
}

/// Numeric view of a value: integers and reals only.
inline std::optional<double> numeric_value(const AttributeValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, end);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

inline std::string to_string(const AttributeValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) return x;
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_real(x);
        else return format_iso8601(x);
      },
      v);
}

struct Event {
  ClassId cls = 0;
  Timestamp time;
  Attributes attrs;
  std::size_t ordinal = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string id;
  std::vector<Event> events;
  /// Distinct classes occurring in the trace.
  ClassSet classes;

  std::size_t size() const noexcept { return events.size(); }
  friend bool operator==(const Trace& a, const Trace& b) { return a.id == b.id && a.events == b.events; }
};

/// Immutable event log. Traces keep the order in which their case id first
/// appeared in the input; events inside a trace are sorted by timestamp with
/// input order breaking ties.
class EventLog {
 public:
  class Builder;

  const std::vector<Trace>& traces() const noexcept { return traces_; }
  std::size_t trace_count() const noexcept { return traces_.size(); }
  std::size_t class_count() const noexcept { return class_names_.size(); }
  std::size_t event_count() const noexcept { return event_count_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  const std::string& class_name(ClassId id) const {
    if (id >= class_names_.size()) throw UnknownClass("#" + std::to_string(id));
    return class_names_[id];
  }

  std::optional<ClassId> find_class(std::string_view name) const {
    auto it = std::lower_bound(class_names_.begin(), class_names_.end(), name);
    if (it == class_names_.end() || *it != name) return std::nullopt;
    return static_cast<ClassId>(it - class_names_.begin());
  }

  ClassId class_id(std::string_view name) const {
    if (auto id = find_class(name)) return *id;
    throw UnknownClass(std::string(name));
  }

  /// Class set from names; throws UnknownClass for names outside C_L.
  ClassSet classes_of(std::initializer_list<std::string_view> names) const {
    std::vector<ClassId> ids;
    for (auto n : names) ids.push_back(class_id(n));
    return ClassSet(std::move(ids));
  }
  ClassSet classes_of(const std::vector<std::string>& names) const {
    std::vector<ClassId> ids;
    for (const auto& n : names) ids.push_back(class_id(n));
    return ClassSet(std::move(ids));
  }

  std::vector<std::string> names_of(const ClassSet& g) const {
    std::vector<std::string> out;
    for (ClassId c : g) out.push_back(class_name(c));
    return out;
  }

  ClassSet all_classes() const {
    std::vector<ClassId> ids(class_names_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ClassId>(i);
    return ClassSet(std::move(ids));
  }

  void require_known(const ClassSet& g) const {
    for (ClassId c : g) {
      if (c >= class_names_.size()) throw UnknownClass("#" + std::to_string(c));
    }
  }

  /// Indices of traces containing at least one event of `cls`.
  const std::vector<std::size_t>& traces_with(ClassId cls) const { return traces_by_class_.at(cls); }

  /// Distinct values of `attr` over events of `cls`; empty if never recorded.
  const std::set<AttributeValue>& class_attribute(ClassId cls, std::string_view attr) const {
    static const std::set<AttributeValue> none;
    if (cls >= class_attrs_.size()) throw UnknownClass("#" + std::to_string(cls));
    const auto& m = class_attrs_[cls];
    auto it = m.find(attr);
    return it == m.end() ? none : it->second;
  }

  bool class_has_attribute(ClassId cls, std::string_view attr) const {
    return !class_attribute(cls, attr).empty();
  }

  /// Every attribute name observed anywhere, sorted.
  std::vector<std::string> attribute_names() const {
    std::set<std::string> names;
    for (const auto& m : class_attrs_) {
      for (const auto& [k, _] : m) names.insert(k);
    }
    return {names.begin(), names.end()};
  }

  friend bool operator==(const EventLog& a, const EventLog& b) {
    return a.class_names_ == b.class_names_ && a.traces_ == b.traces_;
  }

 private:
  std::vector<std::string> class_names_;
  std::vector<Trace> traces_;
  std::vector<std::map<std::string, std::set<AttributeValue>, std::less<>>> class_attrs_;
  std::vector<std::vector<std::size_t>> traces_by_class_;
  std::size_t event_count_ = 0;
};

class EventLog::Builder {
 public:
  Builder& add(std::string case_id, std::string class_name, Timestamp time, Attributes attrs = {}) {
    if (class_name.empty()) throw PreconditionError("event class name must be non-empty");
    if (time.millis < 0) throw PreconditionError("timestamps must be non-negative");
    records_.push_back({std::move(case_id), std::move(class_name), time, std::move(attrs)});
    return *this;
  }

  /// Convenience for fixtures: one trace per call, timestamps spaced by `step_ms`.
  Builder& add_trace(const std::string& case_id, std::initializer_list<std::string_view> classes,
                     std::int64_t start_ms = 0, std::int64_t step_ms = 60000) {
    std::int64_t t = start_ms;
    for (auto c : classes) {
      add(case_id, std::string(c), Timestamp{t});
      t += step_ms;
    }
    return *this;
  }

  EventLog build() && {
    if (records_.empty()) throw EmptyLog();
    EventLog log;
    std::set<std::string> names;
    for (const auto& r : records_) names.insert(r.class_name);
    log.class_names_.assign(names.begin(), names.end());
    log.class_attrs_.resize(log.class_names_.size());
    log.traces_by_class_.resize(log.class_names_.size());

    std::unordered_map<std::string, std::size_t> trace_index;
    for (auto& r : records_) {
      auto [it, inserted] = trace_index.try_emplace(r.case_id, log.traces_.size());
      if (inserted) log.traces_.push_back(Trace{r.case_id, {}, {}});
      Event e;
      e.cls = log.class_id(r.class_name);
      e.time = r.time;
      e.attrs = std::move(r.attrs);
      log.traces_[it->second].events.push_back(std::move(e));
    }
    records_.clear();

    for (std::size_t ti = 0; ti < log.traces_.size(); ++ti) {
      auto& trace = log.traces_[ti];
      std::stable_sort(trace.events.begin(), trace.events.end(),
                       [](const Event& a, const Event& b) { return a.time < b.time; });
      std::vector<ClassId> present;
      for (std::size_t i = 0; i < trace.events.size(); ++i) {
        auto& e = trace.events[i];
        e.ordinal = i;
        present.push_back(e.cls);
        for (const auto& [k, v] : e.attrs) {
          auto& values = log.class_attrs_[e.cls];
          auto slot = values.find(k);
          if (slot == values.end()) slot = values.emplace(k, std::set<AttributeValue>{}).first;
          slot->second.insert(v);
        }
      }
      trace.classes = ClassSet(std::move(present));
      for (ClassId c : trace.classes) log.traces_by_class_[c].push_back(ti);
      log.event_count_ += trace.events.size();
    }
    return log;
  }

 private:
  struct Record {
    std::string case_id;
    std::string class_name;
    Timestamp time;
    Attributes attrs;
  };
  std::vector<Record> records_;
};

/// Distinct values of `attr` over events of the named class.
inline const std::set<AttributeValue>& class_attribute(const EventLog& log, std::string_view cls,
                                                       std::string_view attr) {
  return log.class_attribute(log.class_id(cls), attr);
}

}  // namespace gecco
