#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "bemrt/dense.hpp"

namespace bemrt {

/// Square matrix dump: 8-byte magic "BEMRTMAT", little-endian u64 n, then
/// n*n little-endian float64 in row-major order.
inline constexpr char kMatrixMagic[8] = {'B', 'E', 'M', 'R', 'T', 'M', 'A', 'T'};

void write_matrix(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& is);

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix_file(const std::filesystem::path& path);

std::string matrix_summary(const DenseMatrix& m);

}  // namespace bemrt
