#pragma once

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "matrix.hpp"

namespace normjac {

class MatrixFormatError : public std::runtime_error {
 public:
  MatrixFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Text format: dimension n on the first line, then n lines of n numbers.
inline DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw MatrixFormatError(lineno + 1, "missing dimension");
  std::istringstream head(line);
  long long n_signed = -1;
  std::string extra;
  if (!(head >> n_signed) || (head >> extra) || n_signed < 1)
    throw MatrixFormatError(lineno, "expected a positive dimension");
  const auto n = static_cast<std::size_t>(n_signed);

  DenseMatrix A(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) throw MatrixFormatError(lineno + 1, "expected " + std::to_string(n) + " rows");
    std::istringstream row(line);
    std::string tok;
    std::size_t j = 0;
    while (row >> tok) {
      if (j == n) throw MatrixFormatError(lineno, "too many entries in row");
      double x = 0.0;
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, x);
      if (ec != std::errc() || ptr != last) throw MatrixFormatError(lineno, "not a number: '" + tok + "'");
      if (!std::isfinite(x)) throw MatrixFormatError(lineno, "non-finite entry");
      A(i, j++) = x;
    }
    if (j != n) throw MatrixFormatError(lineno, "expected " + std::to_string(n) + " entries in row");
  }
  if (next_line()) throw MatrixFormatError(lineno, "trailing content after matrix");
  return A;
}

inline void write_matrix(std::ostream& out, const DenseMatrix& A) {
  const std::size_t n = A.size();
  out << n << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << A(i, j);
    }
    out << '\n';
  }
}

inline DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix(in);
}

inline void save_matrix(const std::string& path, const DenseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_matrix(out, A);
}

}  // namespace normjac
