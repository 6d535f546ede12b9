#include "bemrt/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bemrt/error.hpp"

namespace bemrt {

static_assert(std::endian::native == std::endian::little,
              "matrix dumps assume a little-endian host");

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  if (!m.square()) throw Error(ErrorCode::InvalidArgument, "matrix dump requires a square matrix");
  const std::uint64_t n = m.rows();
  os.write(kMatrixMagic, sizeof kMatrixMagic);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  const auto data = m.data();
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!os) throw Error(ErrorCode::Io, "matrix write failed");
}

DenseMatrix read_matrix(std::istream& is) {
  char magic[8];
  std::uint64_t n = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is) throw Error(ErrorCode::Parse, "truncated matrix header", 0);
  if (std::memcmp(magic, kMatrixMagic, sizeof magic) != 0)
    throw Error(ErrorCode::Parse, "bad matrix magic", 0);
  if (n > (std::uint64_t{1} << 20)) throw Error(ErrorCode::Parse, "implausible matrix size", 8);
  DenseMatrix m(n, n);
  auto data = m.data();
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) throw Error(ErrorCode::Parse, "truncated matrix data", 16);
  return m;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_matrix(os, m);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_matrix(is);
}

std::string matrix_summary(const DenseMatrix& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double fro = 0.0;
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    fro += v * v;
  }
  std::ostringstream os;
  os << m.rows() << "x" << m.cols() << std::scientific << std::setprecision(6) << " min " << lo
     << " max " << hi << " frobenius " << std::sqrt(fro) << " inf-norm " << norm_inf(m);
  return os.str();
}

}  // namespace bemrt
