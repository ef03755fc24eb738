#include "ivspectral/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ivspectral/errors.hpp"

namespace ivspectral {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw data_error("failed writing file '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw data_error("non-numeric cell '" + cell + "' at row " +
                     std::to_string(row) + ", column " + std::to_string(col + 1));
  return v;
}

// Returns the 1-based index parsed from names like x3 / z12, or -1.
int suffix_index(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return -1;
  int idx = 0;
  auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
  if (res.ec != std::errc() || res.ptr != name.data() + name.size() || idx < 1)
    return -1;
  return idx;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open data file '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw data_error("data file '" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  int y_col = -1;
  std::map<int, int> x_cols, z_cols;  // 1-based suffix -> column index
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "y") {
      if (y_col >= 0) throw data_error("duplicate column 'y' in header");
      y_col = static_cast<int>(c);
    } else if (int ix = suffix_index(name, 'x'); ix > 0) {
      if (!x_cols.emplace(ix, static_cast<int>(c)).second)
        throw data_error("duplicate column '" + name + "' in header");
    } else if (int iz = suffix_index(name, 'z'); iz > 0) {
      if (!z_cols.emplace(iz, static_cast<int>(c)).second)
        throw data_error("duplicate column '" + name + "' in header");
    } else {
      throw data_error("unexpected column '" + name +
                       "' in header (expected y, x1..xG, z1..zK)");
    }
  }
  if (y_col < 0) throw data_error("missing column 'y' in header");
  if (x_cols.empty()) throw data_error("missing regressor columns x1..xG");
  if (z_cols.empty()) throw data_error("missing instrument columns z1..zK");
  const int g = static_cast<int>(x_cols.size());
  const int k = static_cast<int>(z_cols.size());
  if (x_cols.begin()->first != 1 || x_cols.rbegin()->first != g)
    throw data_error("regressor columns must be contiguous x1..x" +
                     std::to_string(g));
  if (z_cols.begin()->first != 1 || z_cols.rbegin()->first != k)
    throw data_error("instrument columns must be contiguous z1..z" +
                     std::to_string(k));

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw data_error("row " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], lineno, c);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error("data file '" + path + "' has no rows");

  const int n = static_cast<int>(rows.size());
  Dataset data;
  data.y.resize(n);
  data.x.resize(n, g);
  data.z.resize(n, k);
  for (int i = 0; i < n; ++i) {
    data.y[i] = rows[i][y_col];
    for (const auto& [idx, col] : x_cols) data.x(i, idx - 1) = rows[i][col];
    for (const auto& [idx, col] : z_cols) data.z(i, idx - 1) = rows[i][col];
  }
  data.validate();
  return data;
}

std::vector<double> read_value_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open file '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '#') continue;
    const auto end = line.find_last_not_of(" \t");
    out.push_back(parse_cell(line.substr(pos, end - pos + 1), lineno, 0));
  }
  return out;
}

}  // namespace ivspectral
