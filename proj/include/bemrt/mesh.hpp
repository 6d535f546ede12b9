#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bemrt/vec3.hpp"

namespace bemrt {

/// Flat constant triangular element. The collocation node is the centroid.
/// A degenerate element keeps its raw vertices with a zero normal so that a
/// mesh can still be loaded and reported on; integration refuses it.
struct Element {
  std::array<Vec3, 3> vertices;
  Vec3 centroid;
  double area = 0.0;
  Vec3 normal;
  bool degenerate = false;
};

struct ElementGeometry {
  Vec3 centroid;
  double area = 0.0;
  Vec3 normal;
};

/// Relative sliver threshold: area below this times the squared reference
/// diagonal counts as degenerate.
inline constexpr double kDegenerateAreaRatio = 1e-12;

/// Strict geometry of one triangle; throws DegenerateElement when the area is
/// below kDegenerateAreaRatio times the squared diagonal of the triangle's own
/// bounding box.
ElementGeometry element_geometry(const std::array<Vec3, 3>& vertices);

/// Immutable list of elements. Vertices are stored per element, never welded.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;
  /// Builds elements from raw triangles. Degeneracy is judged against the
  /// bounding-box diagonal of the whole mesh.
  explicit SurfaceMesh(std::span<const std::array<Vec3, 3>> triangles);

  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t dof_count() const noexcept { return 3 * elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Element>& elements() const noexcept { return elements_; }

  Vec3 bbox_min() const noexcept { return lo_; }
  Vec3 bbox_max() const noexcept { return hi_; }
  double bbox_diagonal() const noexcept { return norm(hi_ - lo_); }

  /// Same mesh with every coordinate multiplied by `factor`.
  SurfaceMesh scaled(double factor) const;

 private:
  std::vector<Element> elements_;
  Vec3 lo_;
  Vec3 hi_;
};

/// Axis-aligned box [0,lx]x[0,ly]x[0,lz]. Each face is cut into squares
/// (counts per axis) and every square into 4 triangles meeting at its center.
/// Faces are emitted in the order -x, +x, -y, +y, -z, +z, so each face owns a
/// contiguous element range. All normals point outward.
SurfaceMesh generate_box(const Vec3& lengths, const std::array<int, 3>& counts);

/// Cube of the given side with k squares per edge on every face: 24k^2 elements.
SurfaceMesh generate_cube(double side, int k);

struct ValidationReport {
  std::size_t element_count = 0;
  std::vector<std::size_t> degenerate;
  Vec3 closure;                  // sum of area * normal
  double closure_residual = 0.0; // |closure|
  double total_area = 0.0;
  double min_area = 0.0;
  double max_area = 0.0;

  /// Necessary condition for a closed surface, relative to the total area.
  bool looks_closed(double rel_tol = 1e-10) const {
    return closure_residual <= rel_tol * total_area;
  }
};

ValidationReport validate(const SurfaceMesh& mesh);

std::string summary(const SurfaceMesh& mesh);
std::string summary(const ValidationReport& report);

}  // namespace bemrt
