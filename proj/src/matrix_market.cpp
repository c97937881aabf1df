#include "mpcg/matrix_market.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mpcg/errors.hpp"

namespace mpcg {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str()) throw IoError("bad numeric token: " + tok);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_matrix_market(const std::string& path, const CsrMatrix& a,
                         bool symmetric) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real "
      << (symmetric ? "symmetric" : "general") << "\n";
  std::int64_t count = 0;
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (!symmetric || a.col_idx[k] <= i) ++count;
  out << a.n << " " << a.n << " " << count << "\n";
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (symmetric && a.col_idx[k] > i) continue;
      out << (i + 1) << " " << (a.col_idx[k] + 1) << " "
          << format_double(a.values[k]) << "\n";
    }
  if (!out) throw IoError("write failed: " + path);
}

CsrMatrix read_matrix_market(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  std::istringstream header(line);
  std::string banner, object, fmt, field, symmetry;
  header >> banner >> object >> fmt >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" ||
      fmt != "coordinate" || field != "real" ||
      (symmetry != "general" && symmetry != "symmetric"))
    throw IoError("unsupported MatrixMarket header: " + line);
  const bool symmetric = symmetry == "symmetric";
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  int rows = 0, cols = 0;
  std::int64_t count = 0;
  dims >> rows >> cols >> count;
  if (rows != cols || rows < 0) throw IoError("matrix must be square: " + path);
  std::vector<Triplet> trips;
  trips.reserve(symmetric ? 2 * count : count);
  for (std::int64_t k = 0; k < count; ++k) {
    int i = 0, j = 0;
    std::string tok;
    if (!(in >> i >> j >> tok)) throw IoError("truncated entries: " + path);
    const double v = parse_double(tok);
    trips.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) trips.push_back({j - 1, i - 1, v});
  }
  CsrMatrix a = csr_from_triplets(rows, std::move(trips));
  a.validate();
  return a;
}

void write_vector(const std::string& path, const DenseVector& v) {
  auto out = open_out(path);
  for (double x : v) out << format_double(x) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

DenseVector read_vector(const std::string& path) {
  auto in = open_in(path);
  DenseVector v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.push_back(parse_double(line));
  }
  return v;
}

}  // namespace mpcg
