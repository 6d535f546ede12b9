#pragma once
// Independent reference computations and random generators shared by the
// unit tests and the acceptance runner. Nothing here calls the library's
// solver or quadrature code.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "bemrt/dense.hpp"
#include "bemrt/kernel.hpp"
#include "bemrt/vec3.hpp"

namespace oracle {

using bemrt::Mat3;
using bemrt::Vec3;
using Triangle = std::array<Vec3, 3>;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  Vec3 point(double extent) { return {uniform(-extent, extent), uniform(-extent, extent), uniform(-extent, extent)}; }
};

/// Triangle with every interior angle above `min_angle_deg`, random size and
/// orientation.
Triangle random_triangle(Rng& rng, double min_angle_deg = 15.0);

/// Square matrix with entries in [-1, 1] and `shift` added to the diagonal.
bemrt::DenseMatrix random_matrix(Rng& rng, std::size_t n, double shift);
std::vector<double> random_vector(Rng& rng, std::size_t n);

/// Gaussian elimination with full pivoting on the augmented matrix, back
/// substitution, long double accumulation.
std::vector<double> gauss_eliminate(const bemrt::DenseMatrix& a, const std::vector<double>& b);

/// U* evaluated straight from the closed form, written independently of the
/// library kernel.
Mat3 kelvin_u_reference(const Vec3& x, const Vec3& y, double E, double nu);
Mat3 kelvin_t_reference(const Vec3& x, const Vec3& y, const Vec3& n, double E, double nu);

/// Integral of U*(c, y) over the triangle, c = its centroid. The triangle is
/// split into four midpoint children; the centre child still holds c and is
/// split again down to `depth` levels, the corner children are integrated
/// adaptively with a 7-point degree-5 rule to an absolute tolerance.
Mat3 self_g_reference(const Triangle& tri, double E, double nu, int depth = 40, double rel_tol = 1e-12);

double max_abs(const Mat3& m);
double max_abs_diff(const Mat3& a, const Mat3& b);

}  // namespace oracle
