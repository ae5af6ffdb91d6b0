#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "favard/cli/json_text.hpp"

namespace favard::cli {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// A numeric table; every cell is a double (flags are 0/1).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

struct Report {
  std::string command;
  Json options = Json::object();
  std::string input_digest;
  std::string version;
  Json tolerances = Json::object();
  std::vector<Verdict> verdicts;
  std::deque<Table> payload;  // deque: table() hands out references that must survive later tables

  bool pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  void verdict(std::string name, bool ok, std::string detail = {}) {
    verdicts.push_back({std::move(name), ok, std::move(detail)});
  }

  Table& table(std::string name, std::vector<std::string> columns) {
    payload.push_back({std::move(name), std::move(columns), {}});
    return payload.back();
  }
};

inline Json report_to_json(const Report& r) {
  Json j = Json::object();
  j["command"] = r.command;
  j["version"] = r.version;
  j["options"] = r.options;
  j["input_digest"] = r.input_digest;
  j["tolerances"] = r.tolerances;
  j["pass"] = r.pass();
  Json vs = Json::array();
  for (const auto& v : r.verdicts) vs.push_back(Json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = vs;
  Json payload = Json::object();
  for (const auto& t : r.payload) {
    Json rows = Json::array();
    for (const auto& row : t.rows) {
      Json a = Json::array();
      for (double v : row) a.push_back(v);
      rows.push_back(a);
    }
    payload[t.name] = Json{{"columns", t.columns}, {"rows", rows}};
  }
  j["payload"] = payload;
  return j;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Long format, one cell per line: table,row,column,value. Verdicts appear
/// as the table "verdicts" with values 1 (pass) and 0 (fail).
inline std::string report_to_csv(const Report& r) {
  std::string out = "table,row,column,value\n";
  for (std::size_t i = 0; i < r.verdicts.size(); ++i)
    out += "verdicts," + std::to_string(i) + "," + detail::csv_field(r.verdicts[i].name) + "," +
           (r.verdicts[i].pass ? "1" : "0") + "\n";
  for (const auto& t : r.payload)
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      for (std::size_t c = 0; c < t.rows[i].size(); ++c)
        out += detail::csv_field(t.name) + "," + std::to_string(i) + "," + detail::csv_field(t.columns.at(c)) + "," +
               format17(t.rows[i][c]) + "\n";
  return out;
}

/// format is "json" or "csv".
inline std::string emit_report(const Report& r, const std::string& format) {
  if (format == "csv") return report_to_csv(r);
  return dump17(report_to_json(r)) + "\n";
}

}  // namespace favard::cli
