#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "latentdist/errors.hpp"

namespace latentdist::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // parallel to header
  std::vector<std::size_t> line_numbers;
};

// Numeric CSV, RFC-4180 subset: comma separated, '.' decimal, header
// required, no quoting.  Errors carry the offending line number.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::BadSpec, "cannot open '" + path + "'");
  }
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(ErrorCode::BadSpec, "line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(table.header.size()) +
                                   " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      try {
        std::size_t used = 0;
        row[k] = std::stod(fields[k], &used);
        if (used != fields[k].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::BadSpec, "line " + std::to_string(line_no) +
                                     ": cannot parse '" + fields[k] + "'");
      }
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) {
    fail(ErrorCode::BadSpec, "'" + path + "' is empty");
  }
  return table;
}

inline std::size_t column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (table.header[k] == name) return k;
  }
  fail(ErrorCode::BadSpec, "missing column '" + name + "'");
}

inline bool has_column(const CsvTable& table, const std::string& name) {
  for (const auto& h : table.header) {
    if (h == name) return true;
  }
  return false;
}

}  // namespace latentdist::cli
