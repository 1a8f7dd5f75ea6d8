#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpcs_cli {

// Failure to reach or read a file; everything else (ragged rows, bad cells)
// is CsvFormatError. The two map to different process exit codes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric matrix from a CSV file, column-major. A header row is detected by
// its first line containing any cell that does not parse as a number; both
// LF and CRLF line endings are accepted. Cell quoting is not supported.
struct CsvMatrix {
  std::vector<std::string> header;  // empty when the file had none
  std::vector<double> values;       // column-major, rows x cols
  std::int64_t rows = 0;
  std::int64_t cols = 0;

  double at(std::int64_t i, std::int64_t j) const { return values[static_cast<std::size_t>(j) * rows + i]; }
};

// Throws IoError when the file cannot be opened, CsvFormatError (with the
// 1-based file line and column in the message) for ragged rows, non-numeric
// or non-finite cells, and files without data rows.
CsvMatrix read_csv_matrix(const std::string& path);

}  // namespace rpcs_cli
