#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gecco/event_log.hpp"

namespace gecco {

enum class LogFormat { csv, jsonl };

/// Names of the required columns (CSV header names or JSONL keys).
struct ColumnMap {
  std::string case_col = "case";
  std::string class_col = "class";
  std::string time_col = "time";
};

inline LogFormat format_from_path(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return LogFormat::jsonl;
  return LogFormat::csv;
}

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty() || s.find_first_of("0123456789") == std::string_view::npos) return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Cell typing shared by both formats: integer, real, ISO-8601 timestamp, else string.
inline AttributeValue infer_value(std::string_view s) {
  if (auto i = parse_int(s)) return *i;
  if (auto d = parse_real(s)) return *d;
  if (auto t = parse_iso8601(s)) return *t;
  return std::string(s);
}

inline Timestamp parse_time_cell(std::string_view s, std::size_t row) {
  if (auto i = parse_int(s)) {
    if (*i < 0) throw ParseError(row, "negative timestamp");
    return Timestamp{*i};
  }
  if (auto t = parse_iso8601(s)) {
    if (t->millis < 0) throw ParseError(row, "timestamp before 1970");
    return *t;
  }
  throw ParseError(row, "unparseable timestamp '" + std::string(s) + "'");
}

/// RFC 4180 record reader. Tracks the line on which each record starts.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    record_line_ = line_ + 1;
    int ch = in_.get();
    if (ch == EOF) return false;
    std::string cell;
    bool quoted = false;
    bool at_start = true;
    for (;; ch = in_.get()) {
      if (ch == EOF) {
        if (quoted) throw ParseError(record_line_, "unterminated quoted field");
        fields.push_back(std::move(cell));
        ++line_;
        return true;
      }
      const char c = static_cast<char>(ch);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            cell += '"';
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          cell += c;
        }
        continue;
      }
      if (c == '"' && at_start) {
        quoted = true;
        at_start = false;
      } else if (c == ',') {
        fields.push_back(std::move(cell));
        cell.clear();
        at_start = true;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && in_.peek() == '\n') in_.get();
        fields.push_back(std::move(cell));
        ++line_;
        return true;
      } else {
        cell += c;
        at_start = false;
      }
    }
  }

  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos && !s.empty() && s.front() != ' ' &&
      s.back() != ' ') {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace detail

inline EventLog read_csv(std::istream& in, const ColumnMap& cols = {}) {
  detail::CsvReader reader(in);
  std::vector<std::string> header;
  while (reader.next(header) && detail::blank(header)) {
  }
  if (header.empty()) throw EmptyLog();
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(reader.record_line(), "missing required column '" + name + "'");
  };
  const std::size_t case_i = column(cols.case_col);
  const std::size_t class_i = column(cols.class_col);
  const std::size_t time_i = column(cols.time_col);

  EventLog::Builder builder;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (detail::blank(row)) continue;
    const std::size_t line = reader.record_line();
    if (row.size() != header.size()) {
      throw ParseError(line, "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(row.size()));
    }
    if (row[case_i].empty()) throw ParseError(line, "empty case id");
    if (row[class_i].empty()) throw ParseError(line, "empty event class");
    const Timestamp ts = detail::parse_time_cell(row[time_i], line);
    Attributes attrs;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == case_i || i == class_i || i == time_i || row[i].empty()) continue;
      attrs.insert_or_assign(header[i], detail::infer_value(row[i]));
    }
    builder.add(row[case_i], row[class_i], ts, std::move(attrs));
  }
  return std::move(builder).build();
}

inline EventLog read_jsonl(std::istream& in, const ColumnMap& cols = {}) {
  using nlohmann::json;
  EventLog::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");

    auto required = [&](const std::string& key) -> const json& {
      auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) throw ParseError(line_no, "missing required key '" + key + "'");
      return *it;
    };
    const json& case_v = required(cols.case_col);
    const json& class_v = required(cols.class_col);
    const json& time_v = required(cols.time_col);

    std::string case_id;
    if (case_v.is_string()) case_id = case_v.get<std::string>();
    else if (case_v.is_number_integer()) case_id = case_v.dump();
    else throw ParseError(line_no, "case id must be a string or integer");
    if (!class_v.is_string() || class_v.get_ref<const std::string&>().empty()) {
      throw ParseError(line_no, "event class must be a non-empty string");
    }
    Timestamp ts;
    if (time_v.is_number_integer()) {
      ts = detail::parse_time_cell(time_v.dump(), line_no);
    } else if (time_v.is_string()) {
      ts = detail::parse_time_cell(time_v.get_ref<const std::string&>(), line_no);
    } else {
      throw ParseError(line_no, "unparseable timestamp");
    }

    Attributes attrs;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const auto& key = it.key();
      if (key == cols.case_col || key == cols.class_col || key == cols.time_col) continue;
      const json& v = it.value();
      if (v.is_null()) continue;
      if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (auto t = parse_iso8601(s)) attrs.insert_or_assign(key, *t);
        else attrs.insert_or_assign(key, s);
      } else if (v.is_number_integer()) {
        attrs.insert_or_assign(key, v.get<std::int64_t>());
      } else if (v.is_number_float()) {
        attrs.insert_or_assign(key, v.get<double>());
      } else if (v.is_boolean()) {
        attrs.insert_or_assign(key, std::string(v.get<bool>() ? "true" : "false"));
      } else {
        throw ParseError(line_no, "attribute '" + key + "' must be a scalar");
      }
    }
    builder.add(std::move(case_id), class_v.get<std::string>(), ts, std::move(attrs));
  }
  return std::move(builder).build();
}

/// Loads a log from disk. Errors: ParseError (with row), EmptyLog, IoError.
inline EventLog load_log(const std::filesystem::path& path, LogFormat format, const ColumnMap& cols = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return format == LogFormat::csv ? read_csv(in, cols) : read_jsonl(in, cols);
}

inline void write_csv(const EventLog& log, std::ostream& out, const ColumnMap& cols = {}) {
  const auto attrs = log.attribute_names();
  out << detail::csv_escape(cols.case_col) << ',' << detail::csv_escape(cols.class_col) << ','
      << detail::csv_escape(cols.time_col);
  for (const auto& a : attrs) out << ',' << detail::csv_escape(a);
  out << '\n';
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      out << detail::csv_escape(trace.id) << ',' << detail::csv_escape(log.class_name(e.cls)) << ','
          << format_iso8601(e.time);
      for (const auto& a : attrs) {
        out << ',';
        auto it = e.attrs.find(a);
        if (it != e.attrs.end()) out << detail::csv_escape(to_string(it->second));
      }
      out << '\n';
    }
  }
}

inline void write_jsonl(const EventLog& log, std::ostream& out, const ColumnMap& cols = {}) {
  using nlohmann::ordered_json;
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      ordered_json obj;
      obj[cols.case_col] = trace.id;
      obj[cols.class_col] = log.class_name(e.cls);
      obj[cols.time_col] = format_iso8601(e.time);
      for (const auto& [k, v] : e.attrs) {
        std::visit(
            [&](const auto& x) {
              using T = std::decay_t<decltype(x)>;
              if constexpr (std::is_same_v<T, Timestamp>) obj[k] = format_iso8601(x);
              else obj[k] = x;
            },
            v);
      }
      out << obj.dump() << '\n';
    }
  }
}

inline void write_log(const EventLog& log, const std::filesystem::path& path, LogFormat format,
                      const ColumnMap& cols = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  try {
    if (format == LogFormat::csv) write_csv(log, out, cols);
    else write_jsonl(log, out, cols);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot encode log: ") + e.what());
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace gecco
