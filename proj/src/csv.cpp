#include "trdiff/csv.hpp"

#include <cstdio>

#include "trdiff/errors.hpp"

namespace trdiff {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_header(const std::string& config_hash) { return "# trdiff config_hash=" + config_hash + "\n"; }

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path) {
  if (!out_) throw Error("cli_io", "cannot write " + path.string());
  out_ << csv_header(config_hash);
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    out_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  out_ << '\n';
  if (!out_) throw Error("cli_io", "write failed for " + path_.string());
  return *this;
}

CsvWriter& CsvWriter::row(const std::string& label, std::initializer_list<double> values) {
  out_ << label;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
  if (!out_) throw Error("cli_io", "write failed for " + path_.string());
  return *this;
}

}  // namespace trdiff
