#pragma once

// CSV output with a config-hash comment header and fixed 17-significant-digit
// scientific formatting, so identical runs give byte-identical files.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace trdiff {

std::string format_double(double v);

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::vector<std::string>& columns);

  CsvWriter& row(std::initializer_list<double> values);
  CsvWriter& row(const std::string& label, std::initializer_list<double> values);

private:
  std::ofstream out_;
  std::filesystem::path path_;
};

std::string csv_header(const std::string& config_hash);

}  // namespace trdiff
