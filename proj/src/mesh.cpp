#include "bemrt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bemrt/error.hpp"

namespace bemrt {
namespace {

struct Bounds {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void add(const Vec3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  double diagonal() const { return norm(hi - lo); }
};

// Geometry without the degeneracy decision.
ElementGeometry raw_geometry(const std::array<Vec3, 3>& v) {
  const Vec3 c = cross(v[1] - v[0], v[2] - v[0]);
  const double twice_area = norm(c);
  ElementGeometry g;
  g.centroid = (v[0] + v[1] + v[2]) * (1.0 / 3.0);
  g.area = 0.5 * twice_area;
  if (twice_area > 0.0) g.normal = c * (1.0 / twice_area);
  return g;
}

bool is_degenerate(double area, double diagonal) {
  return !(area > kDegenerateAreaRatio * diagonal * diagonal) || !(diagonal > 0.0);
}

}  // namespace

ElementGeometry element_geometry(const std::array<Vec3, 3>& vertices) {
  Bounds b;
  for (const auto& p : vertices) {
    if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite vertex");
    b.add(p);
  }
  ElementGeometry g = raw_geometry(vertices);
  if (is_degenerate(g.area, b.diagonal()))
    throw Error(ErrorCode::DegenerateElement, "degenerate triangle (area below sliver threshold)");
  return g;
}

SurfaceMesh::SurfaceMesh(std::span<const std::array<Vec3, 3>> triangles) {
  Bounds b;
  for (const auto& tri : triangles)
    for (const auto& p : tri) {
      if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite vertex");
      b.add(p);
    }
  const double diag = triangles.empty() ? 0.0 : b.diagonal();
  elements_.reserve(triangles.size());
  for (const auto& tri : triangles) {
    const ElementGeometry g = raw_geometry(tri);
    Element e;
    e.vertices = tri;
    e.centroid = g.centroid;
    e.area = g.area;
    e.degenerate = is_degenerate(g.area, diag);
    e.normal = e.degenerate ? Vec3{} : g.normal;
    elements_.push_back(e);
  }
  if (!triangles.empty()) {
    lo_ = b.lo;
    hi_ = b.hi;
  }
}

SurfaceMesh SurfaceMesh::scaled(double factor) const {
  std::vector<std::array<Vec3, 3>> tris;
  tris.reserve(elements_.size());
  for (const auto& e : elements_)
    tris.push_back({e.vertices[0] * factor, e.vertices[1] * factor, e.vertices[2] * factor});
  return SurfaceMesh(tris);
}

SurfaceMesh generate_box(const Vec3& lengths, const std::array<int, 3>& counts) {
  for (int a = 0; a < 3; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw Error(ErrorCode::InvalidArgument, "box lengths must be positive");
    if (counts[a] < 1) throw Error(ErrorCode::InvalidArgument, "subdivision counts must be >= 1");
  }

  std::vector<std::array<Vec3, 3>> tris;
  // For a face normal to `axis` at `side` (0 or 1), the two in-plane axes are
  // ordered so that (u, v, axis) is right-handed; the low face reverses them.
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      int u = (axis + 1) % 3;
      int v = (axis + 2) % 3;
      if (side == 0) std::swap(u, v);
      const int nu = counts[u];
      const int nv = counts[v];
      const double du = lengths[u] / nu;
      const double dv = lengths[v] / nv;
      auto point = [&](double pu, double pv) {
        Vec3 p;
        p[axis] = side == 0 ? 0.0 : lengths[axis];
        p[u] = pu;
        p[v] = pv;
        return p;
      };
      for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
          const double u0 = i * du, u1 = (i + 1) * du;
          const double v0 = j * dv, v1 = (j + 1) * dv;
          const Vec3 a = point(u0, v0), b = point(u1, v0), c = point(u1, v1), d = point(u0, v1);
          const Vec3 m = point(0.5 * (u0 + u1), 0.5 * (v0 + v1));
          tris.push_back({a, b, m});
          tris.push_back({b, c, m});
          tris.push_back({c, d, m});
          tris.push_back({d, a, m});
        }
      }
    }
  }
  return SurfaceMesh(tris);
}

SurfaceMesh generate_cube(double side, int k) {
  return generate_box({side, side, side}, {k, k, k});
}

ValidationReport validate(const SurfaceMesh& mesh) {
  ValidationReport r;
  r.element_count = mesh.size();
  r.min_area = mesh.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Element& e = mesh[i];
    if (e.degenerate) r.degenerate.push_back(i);
    r.closure += e.normal * e.area;
    r.total_area += e.area;
    r.min_area = std::min(r.min_area, e.area);
    r.max_area = std::max(r.max_area, e.area);
  }
  r.closure_residual = norm(r.closure);
  return r;
}

std::string summary(const SurfaceMesh& mesh) {
  std::ostringstream os;
  os << "elements: " << mesh.size() << "\n"
     << "dofs: " << mesh.dof_count() << "\n";
  if (!mesh.empty()) {
    const Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    os << std::setprecision(6) << "bbox: [" << lo.x << ", " << lo.y << ", " << lo.z << "] - ["
       << hi.x << ", " << hi.y << ", " << hi.z << "]\n";
  }
  return os.str();
}

std::string summary(const ValidationReport& r) {
  std::ostringstream os;
  os << "elements: " << r.element_count << "\n"
     << "degenerate: " << r.degenerate.size() << "\n"
     << std::setprecision(6) << "total area: " << r.total_area << "\n"
     << "min area: " << r.min_area << "\n"
     << "max area: " << r.max_area << "\n"
     << std::setprecision(3) << std::scientific << "closure residual: " << r.closure_residual
     << "\n"
     << "closed: " << (r.looks_closed() ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace bemrt
