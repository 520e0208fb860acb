#include "mullkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mullkit {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && ptr == e && std::isfinite(v);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

std::string fmt17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, Task task, const std::string& response) {
  std::string line;
  if (!std::getline(in, line)) throw Error("dataset CSV is empty");
  const std::vector<std::string> header = split_csv(line);
  auto it = std::find(header.begin(), header.end(), response);
  if (it == header.end()) throw Error("response column '" + response + "' not found in header");
  const std::size_t ycol = static_cast<std::size_t>(it - header.begin());
  if (header.size() < 2) throw Error("dataset CSV needs at least one feature column");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw Error("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                  " fields, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_double(cells[c], row[c]))
        throw Error("line " + std::to_string(lineno) + ", column '" + header[c] + "': missing or non-numeric value '" +
                    cells[c] + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("dataset CSV has no data rows");

  Dataset d;
  d.task = task;
  const Index n = static_cast<Index>(rows.size()), p = static_cast<Index>(header.size()) - 1;
  d.features.resize(n, p);
  d.response.resize(n);
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != ycol) d.names.push_back(header[c]);
  for (Index i = 0; i < n; ++i) {
    Index j = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == ycol)
        d.response[i] = rows[static_cast<std::size_t>(i)][c];
      else
        d.features(i, j++) = rows[static_cast<std::size_t>(i)][c];
    }
  }
  d.validate();
  return d;
}

Dataset read_dataset_csv(const std::string& path, Task task, const std::string& response) {
  auto in = open_in(path);
  return read_dataset_csv(in, task, response);
}

void write_dataset_csv(std::ostream& os, const MatrixXd& features, const VectorXd& response,
                       const std::vector<std::string>& names, const std::string& response_name) {
  for (Index j = 0; j < features.cols(); ++j)
    os << (static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "x" + std::to_string(j + 1))
       << ',';
  os << response_name << '\n';
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) os << fmt17(features(i, j)) << ',';
    os << fmt17(response[i]) << '\n';
  }
}

void write_coefficients_csv(std::ostream& os, const Coefficients& c, const std::vector<std::string>& names) {
  os << "index,name,value\n";
  if (c.intercept) os << "0,(intercept)," << fmt17(*c.intercept) << '\n';
  for (Index j = 0; j < c.size(); ++j) {
    const std::string name =
        static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "x" + std::to_string(j + 1);
    os << j + 1 << ',' << name << ',' << fmt17(c.beta[j]) << '\n';
  }
}

Coefficients read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"index", "name", "value"})
    throw Error("coefficient CSV must start with header index,name,value");
  std::vector<std::pair<long, double>> entries;
  std::optional<double> intercept;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    double idx = 0.0, v = 0.0;
    if (cells.size() != 3 || !parse_double(cells[0], idx) || !parse_double(cells[2], v))
      throw Error("malformed coefficient row '" + line + "'");
    if (idx == 0.0)
      intercept = v;
    else
      entries.emplace_back(static_cast<long>(idx), v);
  }
  Coefficients c(static_cast<Index>(entries.size()), false);
  for (const auto& [idx, v] : entries) {
    if (idx < 1 || idx > static_cast<long>(entries.size())) throw Error("coefficient index out of range");
    c.beta[idx - 1] = v;
  }
  c.intercept = intercept;
  return c;
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error("line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_values_file(const std::string& path) {
  auto in = open_in(path);
  return read_key_values(in);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& cell : split_csv(s)) {
    double v = 0.0;
    if (!parse_double(cell, v)) throw Error("bad number '" + cell + "' in list '" + s + "'");
    out.push_back(v);
  }
  return out;
}

CvGrid read_grid(std::istream& in, CvGrid base) {
  for (const auto& [key, value] : read_key_values(in)) {
    if (key == "lambda")
      base.lambda_multipliers = parse_list(value);
    else if (key == "gamma")
      base.gamma_multipliers = parse_list(value);
    else if (key == "threshold")
      base.threshold_fractions = parse_list(value);
    else if (key == "folds")
      base.folds = std::stoi(value);
    else if (key == "seed")
      base.seed = std::stoull(value);
    else
      throw Error("unknown grid key '" + key + "'");
  }
  return base;
}

CvGrid read_grid_file(const std::string& path, CvGrid base) {
  auto in = open_in(path);
  return read_grid(in, std::move(base));
}

LinearProgram read_lp_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"block", "row", "col", "value"})
    throw Error("LP CSV must start with header block,row,col,value");
  struct Entry {
    std::string block;
    long row, col;
    double value;
  };
  std::vector<Entry> entries;
  long m = 0, q = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    double r = 0.0, c = 0.0, v = 0.0;
    const std::string& blk = cells[0];
    auto num_or_zero = [](const std::string& s, double& out) { return s.empty() ? (out = 0.0, true) : parse_double(s, out); };
    if (cells.size() != 4 || !num_or_zero(cells[1], r) || !num_or_zero(cells[2], c) || !parse_double(cells[3], v) ||
        r < 0 || c < 0 || (blk != "c" && blk != "A" && blk != "b"))
      throw Error("LP CSV line " + std::to_string(lineno) + " is malformed");
    Entry e{blk, static_cast<long>(r), static_cast<long>(c), v};
    if (blk != "b") m = std::max(m, e.col + 1);
    if (blk != "c") q = std::max(q, e.row + 1);
    entries.push_back(e);
  }
  LinearProgram lp;
  lp.c = VectorXd::Zero(m);
  lp.A = MatrixXd::Zero(q, m);
  lp.b = VectorXd::Zero(q);
  for (const auto& e : entries) {
    if (e.block == "c")
      lp.c[e.col] = e.value;
    else if (e.block == "b")
      lp.b[e.row] = e.value;
    else
      lp.A(e.row, e.col) = e.value;
  }
  lp.validate();
  return lp;
}

LinearProgram read_lp_csv(const std::string& path) {
  auto in = open_in(path);
  return read_lp_csv(in);
}

}  // namespace mullkit
