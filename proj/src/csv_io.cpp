#include "nfbc/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nfbc/errors.hpp"

namespace nfbc {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary); // binary: keep LF on every platform
  if (!f) throw IoError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    f << (i ? "," : "") << header[i];
  f << '\n';
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("csv row width mismatch writing " + path);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.16e", row[i]);
      f << (i ? "," : "") << buf;
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) +
                      ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != t.header.size())
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.header.size()) + " columns, got " +
                    std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

} // namespace nfbc
