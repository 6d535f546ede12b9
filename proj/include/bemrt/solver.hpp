#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bemrt/assembly.hpp"
#include "bemrt/dense.hpp"

namespace bemrt {

/// In-place LU with partial pivoting: unit lower L below the diagonal, U on
/// and above. pivots[k] is the row swapped with row k at step k.
struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> pivots;
};

/// Relative pivot threshold: a pivot with |p| <= kSingularPivotFactor * n *
/// eps * max|A| marks the matrix singular to working precision.
inline constexpr double kSingularPivotFactor = 1.0;

/// Throws SingularSystem with the failing step as detail.
LuFactors lu_factorize(DenseMatrix a);

/// Overwrites `rhs` with the solution.
void lu_solve(const LuFactors& f, std::span<double> rhs);

/// Solves for all columns of `rhs` (n x m) at once.
void lu_solve(const LuFactors& f, DenseMatrix& rhs);

/// Pivot threshold used by lu_factorize for a matrix with the given size and
/// largest absolute entry.
double singular_pivot_threshold(std::size_t n, double max_abs_entry);

std::vector<double> solve_direct(const LinearSystem& system);
std::vector<double> solve_direct(const DenseMatrix& a, std::span<const double> b);

/// Full boundary field. solved_u[d] is 1 when u_d came out of the solve
/// (traction-known DOF) and 0 when t_d did.
struct Solution {
  std::vector<double> u;
  std::vector<double> t;
  std::vector<std::uint8_t> solved_u;

  std::size_t size() const noexcept { return u.size(); }
  friend bool operator==(const Solution&, const Solution&) = default;
};

Solution scatter_solution(std::span<const double> x, const BoundarySpec& bc);

/// Net boundary force sum_e t_e * area_e (N).
Vec3 equilibrium_residual(const Solution& sol, const SurfaceMesh& mesh);

DenseMatrix precompute_inverse(const DenseMatrix& a);

enum class OperatorStorage { ExplicitInverse, Factors };

/// Offline operator for a fixed geometry and fixed DOF kinds. The online path
/// rebuilds b = R v from new prescribed values v and applies A^-1 with one
/// matrix-vector product. Column d of R is G[:, d] for traction-known DOFs and
/// -H[:, d] for displacement-known DOFs.
struct PrecomputedOperator {
  std::vector<DofKind> kinds;
  DenseMatrix rhs_operator;
  std::optional<DenseMatrix> inverse;
  std::optional<LuFactors> factors;
};

PrecomputedOperator precompute_operator(const InfluenceMatrices& hg, const BoundarySpec& bc,
                                        OperatorStorage storage = OperatorStorage::ExplicitInverse);

/// Throws StaleOperator when the DOF kinds differ from the precomputed ones.
Solution apply_precomputed(const PrecomputedOperator& op, const BoundarySpec& new_bc);

/// Binary layout: inverse matrix block, rhs-operator block (both in the
/// matrix_io format), then a kind record ("BEMKINDS", u64 n, n bytes).
void save_operator(const PrecomputedOperator& op, const std::filesystem::path& path);
PrecomputedOperator load_operator(const std::filesystem::path& path);

/// CSV: element,cx,cy,cz,ux,uy,uz,tx,ty,tz
void write_solution_csv(std::ostream& os, const Solution& sol, const SurfaceMesh& mesh);
void write_solution_csv(const std::filesystem::path& path, const Solution& sol, const SurfaceMesh& mesh);

}  // namespace bemrt
