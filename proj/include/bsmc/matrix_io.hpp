#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bsmc/block_matrix.hpp"

namespace bsmc::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line_number)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
  int line;
};

/// Whitespace-separated token scanner with '#'-to-end-of-line comments and
/// line tracking for diagnostics. Shared by the matrix, spec and config
/// readers.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  /// Next token, or false at end of input.
  bool next(std::string& token);
  std::string expect(const std::string& what);
  long expect_int(const std::string& what);
  double expect_double(const std::string& what);
  void expect_keyword(const std::string& keyword);
  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 1;
};

/// Text format for block matrices:
///   levels <L>
///   phases <r_0> ... <r_{L-1}>
///   block <i> <j>
///   <row-major entries>
/// Only nonzero blocks are listed. See docs/formats.md.
BlockMatrix read_block_matrix(std::istream& in);
BlockMatrix read_block_matrix_file(const std::string& path);
void write_block_matrix(std::ostream& out, const BlockMatrix& m, const std::string& comment = "");
void write_block_matrix_file(const std::string& path, const BlockMatrix& m,
                             const std::string& comment = "");

/// Value formatted with the given number of significant digits ("%.Ng").
std::string format_double(double value, int significant_digits = 12);

/// One line per level, phases space-separated, 12 significant digits.
void print_stationary(std::ostream& out, const StationaryVector& v);

}  // namespace bsmc::io
