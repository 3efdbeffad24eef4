#pragma once

// Deterministic report assembly.  Every number is printed either as an
// exact scalar string or through one fixed float format, and rows are
// emitted in configuration order, so a rerun reproduces each report byte
// for byte.

#include <cstdio>
#include <string>
#include <vector>

namespace treewitness {

inline std::string float_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out += ',';
        out += csv_field(cells[c]);
      }
      out += '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out;
  }
};

struct ReportFile {
  std::string name;
  std::string content;
};

}  // namespace treewitness
