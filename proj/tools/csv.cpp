#include "csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rpcs_cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_cell(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);  // from_chars rejects it
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

CsvMatrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on \"" + path + "\"");
  const std::string text = buf.str();

  // Physical lines, tolerant of CRLF and of one trailing newline.
  std::vector<std::pair<std::int64_t, std::string_view>> lines;  // (1-based line no, content)
  std::string_view rest = text;
  std::int64_t lineno = 0;
  while (!rest.empty()) {
    ++lineno;
    const std::size_t nl = rest.find('\n');
    std::string_view line = (nl == std::string_view::npos) ? rest : rest.substr(0, nl);
    rest = (nl == std::string_view::npos) ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && rest.empty()) break;  // trailing newline
    lines.emplace_back(lineno, line);
  }
  if (lines.empty()) throw CsvFormatError("\"" + path + "\" has no rows");

  CsvMatrix m;
  std::size_t first_data = 0;
  {
    const auto cells = split_row(lines[0].second);
    bool all_numeric = true;
    double v;
    for (const auto& c : cells)
      if (!parse_cell(c, v)) {
        all_numeric = false;
        break;
      }
    if (!all_numeric) {
      for (const auto& c : cells) m.header.emplace_back(trim(c));
      first_data = 1;
    }
    m.cols = static_cast<std::int64_t>(cells.size());
  }
  if (first_data >= lines.size())
    throw CsvFormatError("\"" + path + "\" has a header but no data rows");

  m.rows = static_cast<std::int64_t>(lines.size() - first_data);
  m.values.resize(static_cast<std::size_t>(m.rows) * m.cols);

  for (std::size_t r = first_data; r < lines.size(); ++r) {
    const auto [fileline, line] = lines[r];
    const auto cells = split_row(line);
    if (static_cast<std::int64_t>(cells.size()) != m.cols)
      throw CsvFormatError("\"" + path + "\" line " + std::to_string(fileline) + ": expected " +
                           std::to_string(m.cols) + " cells, found " + std::to_string(cells.size()));
    const std::int64_t i = static_cast<std::int64_t>(r - first_data);
    for (std::int64_t j = 0; j < m.cols; ++j) {
      double v;
      if (!parse_cell(cells[j], v))
        throw CsvFormatError("\"" + path + "\" line " + std::to_string(fileline) + ", column " +
                             std::to_string(j + 1) + ": not a finite number");
      m.values[static_cast<std::size_t>(j) * m.rows + i] = v;
    }
  }
  return m;
}

}  // namespace rpcs_cli
