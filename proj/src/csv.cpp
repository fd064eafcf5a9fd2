#include "readmit/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace readmit {

namespace {

std::vector<std::string> split_line(const std::string& line, const std::string& path, size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  size_t i = 0;
  const size_t n = line.size();
  while (i <= n) {
    if (i == n) {
      if (quoted) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unterminated quoted field");
      }
      fields.push_back(cur);
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < n && line[i + 1] == '"') {
          cur.push_back('"');
          i += 2;
        } else {
          quoted = false;
          ++i;
        }
      } else {
        cur.push_back(c);
        ++i;
      }
    } else if (c == '"') {
      if (!cur.empty()) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": quote inside unquoted field");
      }
      quoted = true;
      ++i;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
      ++i;
    } else {
      cur.push_back(c);
      ++i;
    }
  }
  return fields;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  CsvTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      table.header = split_line(line, path, lineno);
      if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty())) {
        throw std::runtime_error(path + ":1: empty header row");
      }
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_line(line, path, lineno);
    if (fields.size() != table.header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(table.header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (lineno == 0) throw std::runtime_error(path + ": empty file, header row required");
  return table;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace readmit
