#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bemrt/dense.hpp"
#include "bemrt/kernel.hpp"
#include "bemrt/mesh.hpp"
#include "bemrt/quadrature.hpp"

namespace bemrt {

/// DOF d = 3 * element + axis.
constexpr std::size_t dof_index(std::size_t element, int axis) { return 3 * element + axis; }

/// How the weakly singular self-element integral of U is evaluated.
enum class SelfStrategy {
  /// Split at the centroid into 3 sub-triangles, each collapsed onto the
  /// collocation point.
  Subdivide,
  /// Plain mapped quadrature over the whole element.
  PaperFaithful,
};

/// Dense influence operators of H u = G t, 3N x 3N each.
struct InfluenceMatrices {
  DenseMatrix H;
  DenseMatrix G;
  std::size_t elements = 0;
  friend bool operator==(const InfluenceMatrices&, const InfluenceMatrices&) = default;
};

struct PairBlocks {
  Mat3 H;
  Mat3 G;
};

enum class DofKind : std::uint8_t { TractionKnown = 0, DisplacementKnown = 1 };

/// Prescribed quantity per DOF. Values are mm for displacement-known DOFs and
/// N/mm^2 for traction-known DOFs.
struct BoundarySpec {
  std::vector<DofKind> kinds;
  std::vector<double> values;

  BoundarySpec() = default;
  explicit BoundarySpec(std::size_t dofs, DofKind kind = DofKind::TractionKnown, double value = 0.0)
      : kinds(dofs, kind), values(dofs, value) {}

  std::size_t size() const noexcept { return kinds.size(); }
  std::size_t displacement_known_count() const;

  void set(std::size_t element, int axis, DofKind kind, double value) {
    kinds[dof_index(element, axis)] = kind;
    values[dof_index(element, axis)] = value;
  }
};

/// A x = b where x holds u_d for traction-known DOFs and t_d for
/// displacement-known DOFs (swapped[d] == 1).
struct LinearSystem {
  DenseMatrix A;
  std::vector<double> b;
  std::vector<std::uint8_t> swapped;
  std::vector<std::string> warnings;
};

/// Mapped quadrature points of every element, computed once per assembly.
class ElementQuadrature {
 public:
  ElementQuadrature(const SurfaceMesh& mesh, const QuadratureRule& rule);
  std::span<const TrianglePoint> points(std::size_t element) const {
    return {points_.data() + element * per_element_, per_element_};
  }

 private:
  std::size_t per_element_ = 0;
  std::vector<TrianglePoint> points_;
};

/// Off-diagonal blocks for collocation element i and field element j (i != j).
PairBlocks integrate_pair(std::size_t i, std::size_t j, const SurfaceMesh& mesh, const Material& mat,
                          const QuadratureRule& rule);

Mat3 integrate_self_G(std::size_t i, const SurfaceMesh& mesh, const Material& mat,
                      const QuadratureRule& rule, SelfStrategy strategy);

/// H_ii = -sum_{j != i} H_ij, summed in the order given (ascending j in assembly).
Mat3 rigid_body_diagonal(std::span<const Mat3> off_diagonal_blocks);

InfluenceMatrices assemble(const SurfaceMesh& mesh, const Material& mat, const QuadratureRule& rule,
                           SelfStrategy strategy = SelfStrategy::Subdivide);

/// Allocates zeroed 3N x 3N operators for `mesh`.
InfluenceMatrices allocate_influence(const SurfaceMesh& mesh);

/// Fills the row blocks of collocation elements [first, last). Different row
/// ranges touch disjoint memory and may run concurrently.
void assemble_rows(const SurfaceMesh& mesh, const Material& mat, const ElementQuadrature& quad,
                   const QuadratureRule& rule, SelfStrategy strategy, std::size_t first,
                   std::size_t last, InfluenceMatrices& out);

/// Warnings for rigid translations left unconstrained (no displacement-known
/// DOF along some axis). Throws InvalidArgument if the spec is malformed.
std::vector<std::string> solvability_warnings(const BoundarySpec& bc);

LinearSystem apply_boundary_conditions(const InfluenceMatrices& hg, const BoundarySpec& bc);

/// Allocates the system and records swaps and warnings without filling rows.
LinearSystem prepare_system(const InfluenceMatrices& hg, const BoundarySpec& bc);

/// Fills rows [first, last) of A and b; disjoint ranges may run concurrently.
void apply_boundary_conditions_rows(const InfluenceMatrices& hg, const BoundarySpec& bc,
                                    std::size_t first, std::size_t last, LinearSystem& sys);

/// Fixes every element whose centroid lies on y = 0 and loads every element on
/// y = side with traction (0, load, 0); all other DOFs are traction-free.
BoundarySpec cube_sample_bc(const SurfaceMesh& mesh, double side, double load);

}  // namespace bemrt
