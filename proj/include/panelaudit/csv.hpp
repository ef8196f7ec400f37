#pragma once

#include <string>
#include <vector>

namespace panelaudit::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, -1 if absent.
  int column(const std::string &name) const;
};

// Reads a UTF-8 comma-separated file with a header row. No quoting
// support: the panel formats never contain commas inside fields.
Table read_file(const std::string &path);

void write_file(const std::string &path, const Table &table);

std::string join_row(const std::vector<std::string> &fields);

} // namespace panelaudit::csv
