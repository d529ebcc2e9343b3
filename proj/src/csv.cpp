#include "impactflow/csv.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "impactflow/version.hpp"

namespace impactflow {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     std::uint64_t config_hash, std::uint64_t seed)
    : out_(path, std::ios::binary), path_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out_ << "# " << kToolName << ' ' << kToolVersion << '\n';
  out_ << "# config_hash=" << hash_hex << '\n';
  out_ << "# seed=" << seed << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::write_cells(const double* values, std::size_t count) {
  if (count != columns_) {
    throw std::runtime_error("csv row has " + std::to_string(count) + " cells, expected " +
                             std::to_string(columns_));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  write_cells(values.begin(), values.size());
}

void CsvWriter::row(const std::vector<double>& values) {
  write_cells(values.data(), values.size());
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.flush();
  if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
  out_.close();
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    out_.flush();
    out_.close();
  }
}

}  // namespace impactflow
