#include "bemrt/assembly.hpp"

#include <cmath>
#include <numbers>

#include "bemrt/error.hpp"

namespace bemrt {
namespace {

void require_index(std::size_t i, const SurfaceMesh& mesh) {
  if (i >= mesh.size()) throw Error(ErrorCode::InvalidArgument, "element index out of range");
}

void require_regular(const SurfaceMesh& mesh, std::size_t e) {
  if (mesh[e].degenerate)
    throw Error(ErrorCode::DegenerateElement, "element " + std::to_string(e) + " is degenerate", e);
}

// Both kernels at once over mapped points; same expressions as kelvin_U and
// kelvin_T with the shared factors hoisted.
PairBlocks integrate_kernels(const Vec3& source, std::span<const TrianglePoint> pts, const Vec3& n,
                             const Material& mat) {
  const double cu = 1.0 / (16.0 * std::numbers::pi * mat.mu * (1.0 - mat.nu));
  const double ct = -1.0 / (8.0 * std::numbers::pi * (1.0 - mat.nu));
  const double diag_u = 3.0 - 4.0 * mat.nu;
  const double a = 1.0 - 2.0 * mat.nu;
  const double nn[3] = {n.x, n.y, n.z};

  PairBlocks acc{zero_mat3(), zero_mat3()};
  for (const TrianglePoint& p : pts) {
    const Vec3 d = p.point - source;
    const double r = norm(d);
    if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "quadrature point hits collocation point");
    const double inv_r = 1.0 / r;
    const double dr[3] = {d.x * inv_r, d.y * inv_r, d.z * inv_r};
    const double drdn = dr[0] * nn[0] + dr[1] * nn[1] + dr[2] * nn[2];
    const double wu = p.weight * cu * inv_r;
    const double wt = p.weight * ct * inv_r * inv_r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double rr = dr[i] * dr[j];
        const double delta = i == j ? 1.0 : 0.0;
        acc.G[i][j] += wu * (diag_u * delta + rr);
        acc.H[i][j] += wt * (drdn * (a * delta + 3.0 * rr) - a * (dr[i] * nn[j] - dr[j] * nn[i]));
      }
    }
  }
  return acc;
}

Mat3 integrate_U(const Vec3& source, std::span<const TrianglePoint> pts, const Material& mat) {
  const double cu = 1.0 / (16.0 * std::numbers::pi * mat.mu * (1.0 - mat.nu));
  const double diag_u = 3.0 - 4.0 * mat.nu;
  Mat3 g = zero_mat3();
  for (const TrianglePoint& p : pts) {
    const Vec3 d = p.point - source;
    const double r = norm(d);
    if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "quadrature point hits collocation point");
    const double dr[3] = {d.x / r, d.y / r, d.z / r};
    const double w = p.weight * cu / r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] += w * ((i == j ? diag_u : 0.0) + dr[i] * dr[j]);
  }
  return g;
}

Mat3 self_G(const Element& e, const Material& mat, const QuadratureRule& rule, SelfStrategy strategy) {
  std::vector<TrianglePoint> pts;
  if (strategy == SelfStrategy::PaperFaithful) {
    map_rule_to_triangle(rule, e.vertices, pts);
    return integrate_U(e.centroid, pts, mat);
  }
  Mat3 g = zero_mat3();
  for (int s = 0; s < 3; ++s) {
    map_rule_to_apex_sinh(rule, {e.centroid, e.vertices[s], e.vertices[(s + 1) % 3]}, pts);
    const Mat3 part = integrate_U(e.centroid, pts, mat);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] += part[i][j];
  }
  return g;
}

void store_block(DenseMatrix& m, std::size_t i, std::size_t j, const Mat3& blk) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(3 * i + a, 3 * j + b) = blk[a][b];
}

}  // namespace

std::size_t BoundarySpec::displacement_known_count() const {
  std::size_t n = 0;
  for (DofKind k : kinds) n += k == DofKind::DisplacementKnown ? 1 : 0;
  return n;
}

ElementQuadrature::ElementQuadrature(const SurfaceMesh& mesh, const QuadratureRule& rule)
    : per_element_(rule.points.size()) {
  points_.reserve(mesh.size() * per_element_);
  std::vector<TrianglePoint> buf;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    require_regular(mesh, e);
    map_rule_to_triangle(rule, mesh[e].vertices, buf);
    points_.insert(points_.end(), buf.begin(), buf.end());
  }
}

PairBlocks integrate_pair(std::size_t i, std::size_t j, const SurfaceMesh& mesh, const Material& mat,
                          const QuadratureRule& rule) {
  require_index(i, mesh);
  require_index(j, mesh);
  if (i == j) throw Error(ErrorCode::InvalidArgument, "integrate_pair requires i != j");
  require_regular(mesh, i);
  require_regular(mesh, j);
  std::vector<TrianglePoint> pts;
  map_rule_to_triangle(rule, mesh[j].vertices, pts);
  return integrate_kernels(mesh[i].centroid, pts, mesh[j].normal, mat);
}

Mat3 integrate_self_G(std::size_t i, const SurfaceMesh& mesh, const Material& mat,
                      const QuadratureRule& rule, SelfStrategy strategy) {
  require_index(i, mesh);
  require_regular(mesh, i);
  return self_G(mesh[i], mat, rule, strategy);
}

Mat3 rigid_body_diagonal(std::span<const Mat3> blocks) {
  Mat3 sum = zero_mat3();
  for (const Mat3& b : blocks)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) sum[r][c] += b[r][c];
  for (auto& row : sum)
    for (double& v : row) v = -v;
  return sum;
}

InfluenceMatrices allocate_influence(const SurfaceMesh& mesh) {
  const std::size_t n = mesh.dof_count();
  return InfluenceMatrices{DenseMatrix(n, n), DenseMatrix(n, n), mesh.size()};
}

void assemble_rows(const SurfaceMesh& mesh, const Material& mat, const ElementQuadrature& quad,
                   const QuadratureRule& rule, SelfStrategy strategy, std::size_t first,
                   std::size_t last, InfluenceMatrices& out) {
  if (first > last || last > mesh.size())
    throw Error(ErrorCode::InvalidArgument, "row range out of bounds");
  std::vector<Mat3> off;
  off.reserve(mesh.size());
  for (std::size_t i = first; i < last; ++i) {
    require_regular(mesh, i);
    off.clear();
    const Vec3& c = mesh[i].centroid;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
      if (j == i) continue;
      const PairBlocks pb = integrate_kernels(c, quad.points(j), mesh[j].normal, mat);
      store_block(out.H, i, j, pb.H);
      store_block(out.G, i, j, pb.G);
      off.push_back(pb.H);
    }
    store_block(out.H, i, i, rigid_body_diagonal(off));
    store_block(out.G, i, i, self_G(mesh[i], mat, rule, strategy));
  }
}

InfluenceMatrices assemble(const SurfaceMesh& mesh, const Material& mat, const QuadratureRule& rule,
                           SelfStrategy strategy) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot assemble an empty mesh");
  const ElementQuadrature quad(mesh, rule);
  InfluenceMatrices hg = allocate_influence(mesh);
  assemble_rows(mesh, mat, quad, rule, strategy, 0, mesh.size(), hg);
  return hg;
}

std::vector<std::string> solvability_warnings(const BoundarySpec& bc) {
  if (bc.values.size() != bc.kinds.size() || bc.kinds.size() % 3 != 0)
    throw Error(ErrorCode::InvalidArgument, "boundary spec must cover 3 DOFs per element");
  bool fixed[3] = {false, false, false};
  for (std::size_t d = 0; d < bc.size(); ++d)
    if (bc.kinds[d] == DofKind::DisplacementKnown) fixed[d % 3] = true;
  std::vector<std::string> w;
  static constexpr char kAxis[3] = {'x', 'y', 'z'};
  for (int a = 0; a < 3; ++a)
    if (!fixed[a])
      w.push_back(std::string("no displacement-known DOF along ") + kAxis[a] +
                  ": rigid translation unconstrained, system is singular or ill-posed");
  return w;
}

LinearSystem prepare_system(const InfluenceMatrices& hg, const BoundarySpec& bc) {
  const std::size_t n = hg.H.rows();
  if (bc.size() != n)
    throw Error(ErrorCode::InvalidArgument, "boundary spec covers " + std::to_string(bc.size()) +
                                                " DOFs, system has " + std::to_string(n));
  LinearSystem sys;
  sys.warnings = solvability_warnings(bc);
  sys.A = DenseMatrix(n, n);
  sys.b.assign(n, 0.0);
  sys.swapped.resize(n);
  for (std::size_t d = 0; d < n; ++d) sys.swapped[d] = bc.kinds[d] == DofKind::DisplacementKnown;
  return sys;
}

void apply_boundary_conditions_rows(const InfluenceMatrices& hg, const BoundarySpec& bc,
                                    std::size_t first, std::size_t last, LinearSystem& sys) {
  const std::size_t n = hg.H.rows();
  for (std::size_t r = first; r < last; ++r) {
    const auto h = hg.H.row(r);
    const auto g = hg.G.row(r);
    auto a = sys.A.row(r);
    double rhs = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      if (bc.kinds[d] == DofKind::TractionKnown) {
        a[d] = h[d];
        rhs += g[d] * bc.values[d];
      } else {
        a[d] = -g[d];
        rhs -= h[d] * bc.values[d];
      }
    }
    sys.b[r] = rhs;
  }
}

LinearSystem apply_boundary_conditions(const InfluenceMatrices& hg, const BoundarySpec& bc) {
  LinearSystem sys = prepare_system(hg, bc);
  apply_boundary_conditions_rows(hg, bc, 0, hg.H.rows(), sys);
  return sys;
}

BoundarySpec cube_sample_bc(const SurfaceMesh& mesh, double side, double load) {
  BoundarySpec bc(mesh.dof_count());
  const double tol = 1e-9 * side;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const double y = mesh[e].centroid.y;
    if (std::fabs(y) <= tol) {
      for (int a = 0; a < 3; ++a) bc.set(e, a, DofKind::DisplacementKnown, 0.0);
    } else if (std::fabs(y - side) <= tol) {
      bc.set(e, 1, DofKind::TractionKnown, load);
    }
  }
  return bc;
}

}  // namespace bemrt
