#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace selfsim::io {

/// Comma-separated table, every value printed with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

std::string format_number(double x);

}  // namespace selfsim::io
