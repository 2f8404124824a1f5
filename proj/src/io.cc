#include "acsolve/io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace acsolve {

namespace {

[[noreturn]] void Fail(const std::string& path, int line,
                       const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ":0: cannot open file");
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

double ParseReal(const std::string& tok, const std::string& path, int line) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    Fail(path, line, "expected a finite real, got '" + tok + "'");
  }
  return value;
}

long ParseInt(const std::string& tok, const std::string& path, int line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    Fail(path, line, "expected an integer, got '" + tok + "'");
  }
  return value;
}

std::vector<std::string> Tokens(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

std::string StripComment(const std::string& s) {
  size_t pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

struct MarketData {
  int rows = 0;
  int cols = 0;
  std::vector<Entry> entries;
};

MarketData ReadMarket(const std::string& path, double* alpha) {
  std::ifstream in = OpenIn(path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) Fail(path, 1, "empty file");
  ++lineno;
  std::vector<std::string> header = Tokens(Lower(line));
  if (header.size() < 5 || header[0] != "%%matrixmarket" ||
      header[1] != "matrix" || header[2] != "coordinate") {
    Fail(path, lineno, "expected '%%MatrixMarket matrix coordinate ...'");
  }
  if (header[3] != "real" && header[3] != "integer") {
    Fail(path, lineno, "unsupported field '" + header[3] + "'");
  }
  bool symmetric = header[4] == "symmetric";
  if (!symmetric && header[4] != "general") {
    Fail(path, lineno, "unsupported symmetry '" + header[4] + "'");
  }
  MarketData data;
  long expected = -1;
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> tok = Tokens(line);
    if (tok.empty()) continue;
    if (tok[0][0] == '%') {
      if (alpha != nullptr && tok.size() == 2 && tok[0] == "%alpha") {
        *alpha = ParseReal(tok[1], path, lineno);
      }
      continue;
    }
    if (expected < 0) {
      if (tok.size() != 3) Fail(path, lineno, "expected 'rows cols nnz'");
      data.rows = static_cast<int>(ParseInt(tok[0], path, lineno));
      data.cols = static_cast<int>(ParseInt(tok[1], path, lineno));
      expected = ParseInt(tok[2], path, lineno);
      if (data.rows < 0 || data.cols < 0 || expected < 0) {
        Fail(path, lineno, "negative size");
      }
      continue;
    }
    if (tok.size() != 3) Fail(path, lineno, "expected 'row col value'");
    long i = ParseInt(tok[0], path, lineno);
    long j = ParseInt(tok[1], path, lineno);
    double v = ParseReal(tok[2], path, lineno);
    if (i < 1 || i > data.rows || j < 1 || j > data.cols) {
      Fail(path, lineno, "index out of range");
    }
    data.entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    if (symmetric && i != j) {
      data.entries.push_back(
          {static_cast<int>(j - 1), static_cast<int>(i - 1), v});
    }
    ++seen;
  }
  if (expected < 0) Fail(path, lineno, "missing size line");
  if (seen != expected) {
    Fail(path, lineno,
         "expected " + std::to_string(expected) + " entries, found " +
             std::to_string(seen));
  }
  return data;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

SparseMatrix read_matrix_market(const std::string& path, double* alpha) {
  MarketData data = ReadMarket(path, alpha);
  return SparseMatrix(data.rows, data.cols, data.entries);
}

Mat read_dense_matrix_market(const std::string& path) {
  MarketData data = ReadMarket(path, nullptr);
  Mat m = Mat::Zero(data.rows, data.cols);
  for (const Entry& e : data.entries) m(e.row, e.col) += e.value;
  return m;
}

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
  std::ofstream out = OpenOut(path);
  std::vector<Entry> entries = A.entries();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << entries.size() << "\n";
  for (const Entry& e : entries) {
    out << e.row + 1 << " " << e.col + 1 << " " << format_double(e.value)
        << "\n";
  }
}

Vec read_vector(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (const std::string& tok : Tokens(StripComment(line))) {
      values.push_back(ParseReal(tok, path, lineno));
    }
  }
  return Eigen::Map<Vec>(values.data(), static_cast<long>(values.size()));
}

void write_vector(const std::string& path, const Vec& v) {
  std::ofstream out = OpenOut(path);
  for (double e : v) out << format_double(e) << "\n";
}

Mat read_csv_matrix(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = StripComment(line);
    if (Tokens(body).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(body);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::vector<std::string> tok = Tokens(cell);
      if (tok.size() != 1) Fail(path, lineno, "malformed CSV cell");
      row.push_back(ParseReal(tok[0], path, lineno));
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      Fail(path, lineno, "row has " + std::to_string(row.size()) +
                             " columns, expected " +
                             std::to_string(rows[0].size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) Fail(path, lineno, "no rows");
  Mat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_csv_matrix(const std::string& path, const Mat& m) {
  std::ofstream out = OpenOut(path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << "\n";
  }
}

std::vector<EdgeLine> read_edge_list(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<EdgeLine> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> tok = Tokens(StripComment(line));
    if (tok.empty()) continue;
    if (tok.size() != 3) Fail(path, lineno, "expected 'u v w'");
    long u = ParseInt(tok[0], path, lineno);
    long v = ParseInt(tok[1], path, lineno);
    double w = ParseReal(tok[2], path, lineno);
    if (u < 0 || v < 0) Fail(path, lineno, "negative vertex index");
    if (w < 0) Fail(path, lineno, "negative edge weight");
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
  }
  return edges;
}

}  // namespace acsolve
