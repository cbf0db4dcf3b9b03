#include "fsi/matrix_market.hpp"

#include "fsi/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace fsi {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_value(const std::string& tok, Index line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw InvalidArgument("matrix market: bad value '" + tok + "' on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::string to_matrix_market(const SpMat& A, MatrixSymmetry symmetry) {
  const bool sym = symmetry == MatrixSymmetry::symmetric;
  if (sym) {
    require(A.rows() == A.cols(), "matrix market: symmetric storage needs a square matrix");
    const SpMat diff = A - SpMat(A.transpose());
    for (Index k = 0; k < diff.outerSize(); ++k)
      for (SpMat::InnerIterator it(diff, k); it; ++it)
        require(it.value() == 0.0, "matrix market: matrix flagged symmetric is not symmetric");
  }
  std::vector<std::string> lines;
  for (Index k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      require(std::isfinite(it.value()), "matrix market: non-finite entry");
      if (sym && it.row() < it.col()) continue;
      lines.push_back(std::to_string(it.row() + 1) + ' ' + std::to_string(it.col() + 1) + ' ' +
                      format_double(it.value()));
    }
  }
  std::string out = "%%MatrixMarket matrix coordinate real ";
  out += sym ? "symmetric\n" : "general\n";
  out += std::to_string(A.rows()) + ' ' + std::to_string(A.cols()) + ' ' +
         std::to_string(lines.size()) + '\n';
  for (const auto& l : lines) out += l + '\n';
  return out;
}

SpMat parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Index line_no = 1;
  if (!std::getline(in, line)) throw InvalidArgument("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, sym;
  header >> banner >> object >> format >> field >> sym;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw InvalidArgument("matrix market: malformed header '" + line + "'");
  }
  field = lower(field);
  sym = lower(sym);
  if (field != "real" && field != "integer" && field != "double") {
    throw InvalidArgument("matrix market: unsupported field '" + field + "'");
  }
  if (sym != "general" && sym != "symmetric") {
    throw InvalidArgument("matrix market: unsupported symmetry '" + sym + "'");
  }
  const bool symmetric = sym == "symmetric";

  Index rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size(line);
    if (!(size >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw InvalidArgument("matrix market: malformed size line " + std::to_string(line_no));
    }
    break;
  }
  if (rows < 0) throw InvalidArgument("matrix market: missing size line");
  if (symmetric && rows != cols) throw InvalidArgument("matrix market: symmetric matrix must be square");

  std::vector<Triplet> trip;
  trip.reserve(symmetric ? 2 * nnz : nnz);
  Index read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    Index i = 0, j = 0;
    std::string tok;
    if (!(entry >> i >> j >> tok)) {
      throw InvalidArgument("matrix market: malformed entry on line " + std::to_string(line_no));
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw InvalidArgument("matrix market: index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of bounds on line " + std::to_string(line_no));
    }
    if (symmetric && i < j) {
      throw InvalidArgument("matrix market: upper-triangle entry in symmetric file on line " +
                            std::to_string(line_no));
    }
    const double v = parse_value(tok, line_no);
    trip.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) trip.emplace_back(j - 1, i - 1, v);
    ++read;
  }
  if (read != nnz) {
    throw InvalidArgument("matrix market: expected " + std::to_string(nnz) + " entries, found " +
                          std::to_string(read));
  }
  SpMat A(rows, cols);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

void write_matrix_market(const SpMat& A, const std::string& path, MatrixSymmetry symmetry) {
  write_text_file(path, to_matrix_market(A, symmetry));
}

void write_matrix_market(const Mat& A, const std::string& path, MatrixSymmetry symmetry) {
  write_matrix_market(SpMat(A.sparseView(0.0, 0.0)), path, symmetry);
}

SpMat read_matrix_market(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_market(buf.str());
}

}  // namespace fsi
