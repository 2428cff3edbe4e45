#include "bsmc/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace bsmc::io {

bool TokenReader::next(std::string& token) {
  token.clear();
  int c = in_.get();
  while (c != EOF) {
    if (c == '\n') {
      ++line_;
    } else if (c == '#') {
      while (c != EOF && c != '\n') c = in_.get();
      continue;
    } else if (!std::isspace(c)) {
      break;
    }
    c = in_.get();
  }
  if (c == EOF) return false;
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in_.get();
  }
  if (c != EOF) in_.unget();
  return true;
}

std::string TokenReader::expect(const std::string& what) {
  std::string token;
  if (!next(token)) throw ParseError("unexpected end of input, expected " + what, line_);
  return token;
}

long TokenReader::expect_int(const std::string& what) {
  const std::string token = expect(what);
  size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != token.size()) throw ParseError("expected integer " + what + ", got '" + token + "'", line_);
  return value;
}

double TokenReader::expect_double(const std::string& what) {
  const std::string token = expect(what);
  size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != token.size()) throw ParseError("expected number " + what + ", got '" + token + "'", line_);
  return value;
}

void TokenReader::expect_keyword(const std::string& keyword) {
  const std::string token = expect("keyword '" + keyword + "'");
  if (token != keyword) throw ParseError("expected '" + keyword + "', got '" + token + "'", line_);
}

BlockMatrix read_block_matrix(std::istream& in) {
  TokenReader reader(in);
  reader.expect_keyword("levels");
  const long levels = reader.expect_int("level count");
  if (levels <= 0) throw ParseError("level count must be positive", reader.line());
  reader.expect_keyword("phases");
  std::vector<int> counts(static_cast<size_t>(levels));
  for (auto& c : counts) {
    const long v = reader.expect_int("phase count");
    if (v <= 0) throw ParseError("phase count must be positive", reader.line());
    c = static_cast<int>(v);
  }
  BlockMatrix m(counts);

  std::string token;
  while (reader.next(token)) {
    if (token != "block") throw ParseError("expected 'block', got '" + token + "'", reader.line());
    const long i = reader.expect_int("block row level");
    const long j = reader.expect_int("block column level");
    if (i < 0 || i >= levels || j < 0 || j >= levels) {
      throw ParseError("block index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range",
                       reader.line());
    }
    Eigen::MatrixXd b(counts[static_cast<size_t>(i)], counts[static_cast<size_t>(j)]);
    for (int a = 0; a < b.rows(); ++a)
      for (int c = 0; c < b.cols(); ++c) b(a, c) = reader.expect_double("block entry");
    m.set_block(static_cast<int>(i), static_cast<int>(j), std::move(b));
  }
  return m;
}

BlockMatrix read_block_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return read_block_matrix(in);
}

void write_block_matrix(std::ostream& out, const BlockMatrix& m, const std::string& comment) {
  if (!m.square()) throw std::invalid_argument("matrix files hold square block matrices");
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "levels " << m.num_levels() << "\nphases";
  for (int c : m.row_phase_counts()) out << ' ' << c;
  out << "\n";
  for (int i = 0; i < m.num_levels(); ++i) {
    for (const BlockMatrix::Entry& e : m.row(i)) {
      out << "block " << i << ' ' << e.col << "\n";
      for (int a = 0; a < e.value.rows(); ++a) {
        for (int c = 0; c < e.value.cols(); ++c) {
          if (c) out << ' ';
          out << format_double(e.value(a, c), 17);
        }
        out << "\n";
      }
    }
  }
}

void write_block_matrix_file(const std::string& path, const BlockMatrix& m,
                             const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  write_block_matrix(out, m, comment);
}

std::string format_double(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
  return buf;
}

void print_stationary(std::ostream& out, const StationaryVector& v) {
  for (int i = 0; i < v.num_levels(); ++i) {
    const auto& row = v.level(i);
    for (int k = 0; k < row.size(); ++k) {
      if (k) out << ' ';
      out << format_double(row[k], 12);
    }
    out << "\n";
  }
}

}  // namespace bsmc::io
