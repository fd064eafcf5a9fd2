#include "readmit/report.hpp"

#include <cstdio>
#include <sstream>

namespace readmit {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void pad(std::string& line, size_t width) {
  if (line.size() < width) line.append(width - line.size(), ' ');
}

std::string rule(size_t width) { return std::string(width, '-') + "\n"; }

}  // namespace

std::string render_method_table(const std::vector<MethodReport>& methods) {
  size_t name_width = std::string("Method").size();
  for (const auto& m : methods) name_width = std::max(name_width, m.display.size());
  name_width += 2;
  const size_t cstat_width = 14;  // "Avg. c-stats" + gap
  const size_t ci_width = 20;     // "(0.6635, 0.6834)" + gap

  std::ostringstream out;
  std::string header = "Method";
  pad(header, name_width);
  header += "Avg. c-stats";
  pad(header, name_width + cstat_width);
  header += "95% CI";
  pad(header, name_width + cstat_width + ci_width);
  header += "Delta";
  out << header << "\n" << rule(header.size());

  for (const auto& m : methods) {
    std::string line = m.display;
    pad(line, name_width);
    line += fixed4(m.mean);
    pad(line, name_width + cstat_width);
    line += "(" + fixed4(m.ci_lo) + ", " + fixed4(m.ci_hi) + ")";
    pad(line, name_width + cstat_width + ci_width);
    line += m.is_baseline ? "-" : fixed4(m.delta);
    out << line << "\n";
  }
  return out.str();
}

std::string render_describe_table(const std::vector<DescribeRow>& rows) {
  size_t name_width = std::string("Modality").size();
  for (const auto& r : rows) name_width = std::max(name_width, r.modality.size());
  name_width += 2;
  const size_t col_width = 10;

  std::ostringstream out;
  std::string header = "Modality";
  pad(header, name_width);
  header += "Patients";
  pad(header, name_width + col_width);
  header += "Notes";
  pad(header, name_width + 2 * col_width);
  header += "Common Patients";
  out << header << "\n" << rule(header.size());

  for (const auto& r : rows) {
    std::string line = r.modality;
    pad(line, name_width);
    line += std::to_string(r.patients);
    pad(line, name_width + col_width);
    line += r.notes ? std::to_string(*r.notes) : "N.A.";
    pad(line, name_width + 2 * col_width);
    line += std::to_string(r.common);
    out << line << "\n";
  }
  return out.str();
}

std::string render_di_table(const DiReport& report) {
  size_t name_width = std::string("Feature").size();
  for (const auto& row : report.top) name_width = std::max(name_width, row.name.size());
  name_width += 2;

  std::ostringstream out;
  out << "Modality: " << report.modality << "\n";
  std::string header = "Feature";
  pad(header, name_width);
  header += "Score";
  out << header << "\n" << rule(header.size());
  for (const auto& row : report.top) {
    std::string line = row.name;
    pad(line, name_width);
    line += fixed4(row.score);
    out << line << "\n";
  }
  return out.str();
}

}  // namespace readmit
