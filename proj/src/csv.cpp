#include "ddp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix read_csv_matrix(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && skip_header) continue;
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      std::size_t parsed = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &parsed);
      } catch (const std::exception&) {
        throw std::invalid_argument(path + ", line " + std::to_string(line_no) +
                                    ": not a number: '" + field + "'");
      }
      while (parsed < field.size() &&
             (field[parsed] == ' ' || field[parsed] == '\t'))
        ++parsed;
      if (parsed != field.size())
        throw std::invalid_argument(path + ", line " + std::to_string(line_no) +
                                    ": not a number: '" + field + "'");
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument(path + ", line " + std::to_string(line_no) +
                                  ": expected " +
                                  std::to_string(rows.front().size()) +
                                  " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument(path + ", line " + std::to_string(line_no) +
                                ": no data rows");

  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  return m;
}

void write_csv_matrix(std::ostream& out, const Matrix& m) {
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  write_csv_matrix(out, m);
}

}  // namespace ddp
