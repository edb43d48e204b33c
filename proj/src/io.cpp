#include "binrec/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace binrec::io {

namespace {

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw ConfigError(std::string("parse error while reading ") + what);
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  return out;
}

void check_written(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n' << std::setprecision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  const auto m = read_value<long long>(in, "matrix rows");
  const auto n = read_value<long long>(in, "matrix cols");
  if (m < 0 || n < 0) throw ConfigError("matrix: negative dimensions");
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      a(i, j) = read_value<double>(in, "matrix entry");
      if (!std::isfinite(a(i, j))) throw ConfigError("matrix: non-finite entry");
    }
  return a;
}

void save_matrix(const std::filesystem::path& path, const Matrix& a) {
  auto out = open_out(path);
  write_matrix(out, a);
  check_written(out, path);
}

Matrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_signal(std::ostream& out, const BinarySignal& x) {
  out << x.size() << ' ' << x.sparsity() << '\n';
  for (std::size_t i = 0; i < x.support().size(); ++i) {
    if (i > 0) out << ' ';
    out << x.support()[i];
  }
  out << '\n';
}

BinarySignal read_signal(std::istream& in) {
  const auto n = read_value<long long>(in, "signal dimension");
  const auto k = read_value<long long>(in, "signal sparsity");
  if (k < 0 || k > n) throw ConfigError("signal: need 0 <= k <= N");
  std::vector<Index> support(static_cast<std::size_t>(k));
  for (auto& idx : support) idx = read_value<long long>(in, "support index");
  return BinarySignal(n, std::move(support));
}

void save_signal(const std::filesystem::path& path, const BinarySignal& x) {
  auto out = open_out(path);
  write_signal(out, x);
  check_written(out, path);
}

BinarySignal load_signal(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_signal(in);
}

void write_vector(std::ostream& out, const Vector& v) {
  out << v.size() << '\n' << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) out << ' ';
    out << v[i];
  }
  out << '\n';
}

Vector read_vector(std::istream& in) {
  const auto n = read_value<long long>(in, "vector length");
  if (n < 0) throw ConfigError("vector: negative length");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = read_value<double>(in, "vector entry");
  return v;
}

void save_vector(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  write_vector(out, v);
  check_written(out, path);
}

Vector load_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

}  // namespace binrec::io
