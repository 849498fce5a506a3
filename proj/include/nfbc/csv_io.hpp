#pragma once

#include <string>
#include <vector>

namespace nfbc {

// Comma-separated, LF line endings, one header row, doubles as %.16e.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

} // namespace nfbc
