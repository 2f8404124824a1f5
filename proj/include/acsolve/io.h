#pragma once

#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "acsolve/sparse_matrix.h"

namespace acsolve {

// Raised by every reader; the message starts with "file:line:".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix Market "coordinate real general" or "coordinate real symmetric".
// Comment lines of the form "%alpha <value>" are collected into *alpha when
// the pointer is non-null.
SparseMatrix read_matrix_market(const std::string& path,
                                double* alpha = nullptr);
void write_matrix_market(const std::string& path, const SparseMatrix& A);
Mat read_dense_matrix_market(const std::string& path);

// Whitespace-separated reals, any line layout. '#' starts a comment.
Vec read_vector(const std::string& path);
void write_vector(const std::string& path, const Vec& v);

// Comma-separated rows of reals, all the same length.
Mat read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Mat& m);

struct EdgeLine {
  int u;
  int v;
  double w;
};
// Lines "u v w" with 0-indexed vertices; '#' starts a comment.
std::vector<EdgeLine> read_edge_list(const std::string& path);

// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace acsolve
