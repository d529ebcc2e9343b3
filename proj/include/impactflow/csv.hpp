#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace impactflow {

/// Shortest representation that round-trips the exact double; locale
/// independent, period decimal separator.
std::string format_double(double value);

/// CSV file with a deterministic comment header:
///
///   # impactflow <version>
///   # config_hash=<16 hex digits>
///   # seed=<decimal>
///   col1,col2,...
///
/// Numeric cells are written with format_double.  The writer never embeds
/// timestamps or paths, so reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            std::uint64_t config_hash, std::uint64_t seed);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

  /// Flushes and closes; throws std::runtime_error when the stream failed.
  void close();

  ~CsvWriter();

 private:
  void write_cells(const double* values, std::size_t count);

  std::ofstream out_;
  std::string path_;
  std::size_t columns_ = 0;
  bool closed_ = false;
};

}  // namespace impactflow
