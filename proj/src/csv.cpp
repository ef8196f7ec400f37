#include "panelaudit/csv.hpp"

#include <fstream>
#include <sstream>

#include "panelaudit/errors.hpp"

namespace panelaudit::csv {

int Table::column(const std::string &name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

static std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw make_error("FileNotReadable", path);
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw make_error("EmptyFile", path);
  return table;
}

std::string join_row(const std::vector<std::string> &fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

void write_file(const std::string &path, const Table &table) {
  std::ofstream out(path);
  if (!out) throw make_error("FileNotWritable", path);
  out << join_row(table.header) << '\n';
  for (const auto &row : table.rows) out << join_row(row) << '\n';
}

} // namespace panelaudit::csv
