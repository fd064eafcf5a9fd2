#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace readmit {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;  // 1-based source line per row
};

// RFC-4180-style fields: double quotes, "" escapes, commas inside quotes.
// Quoted fields may not span lines. Throws with file and line on bad input.
CsvTable read_csv(const std::string& path);

std::string csv_escape(const std::string& field);

}  // namespace readmit
