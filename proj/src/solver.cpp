#include "bemrt/solver.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "bemrt/error.hpp"
#include "bemrt/matrix_io.hpp"

namespace bemrt {

double singular_pivot_threshold(std::size_t n, double max_abs_entry) {
  return kSingularPivotFactor * static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
         max_abs_entry;
}

LuFactors lu_factorize(DenseMatrix a) {
  if (!a.square()) throw Error(ErrorCode::InvalidArgument, "LU requires a square matrix");
  const std::size_t n = a.rows();
  for (double v : a.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  const double tiny = singular_pivot_threshold(n, max_abs(a.data()));

  LuFactors f;
  f.pivots.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Largest magnitude wins; ties go to the lowest row.
    std::size_t p = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > tiny))
      throw Error(ErrorCode::SingularSystem, "matrix is singular to working precision at pivot " +
                                                 std::to_string(k), k);
    f.pivots[k] = p;
    if (p != k) {
      auto rk = a.row(k);
      auto rp = a.row(p);
      for (std::size_t j = 0; j < n; ++j) std::swap(rk[j], rp[j]);
    }
    const auto rk = a.row(k);
    const double pivot = rk[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = a.row(i);
      const double l = ri[k] / pivot;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  f.lu = std::move(a);
  return f;
}

void lu_solve(const LuFactors& f, std::span<double> x) {
  const std::size_t n = f.lu.rows();
  if (x.size() != n) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");
  for (std::size_t k = 0; k < n; ++k)
    if (f.pivots[k] != k) std::swap(x[k], x[f.pivots[k]]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = f.lu.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto r = f.lu.row(i);
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= r[j] * x[j];
    x[i] = s / r[i];
  }
}

void lu_solve(const LuFactors& f, DenseMatrix& b) {
  const std::size_t n = f.lu.rows();
  if (b.rows() != n) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    if (f.pivots[k] == k) continue;
    auto rk = b.row(k);
    auto rp = b.row(f.pivots[k]);
    for (std::size_t j = 0; j < rk.size(); ++j) std::swap(rk[j], rp[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto bi = b.row(i);
    const auto r = f.lu.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double l = r[k];
      if (l == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < bi.size(); ++j) bi[j] -= l * bk[j];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    auto bi = b.row(i);
    const auto r = f.lu.row(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      const double u = r[k];
      if (u == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < bi.size(); ++j) bi[j] -= u * bk[j];
    }
    const double inv = r[i];
    for (double& v : bi) v /= inv;
  }
}

std::vector<double> solve_direct(const DenseMatrix& a, std::span<const double> b) {
  if (b.size() != a.rows()) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");
  const LuFactors f = lu_factorize(a);
  std::vector<double> x(b.begin(), b.end());
  lu_solve(f, x);
  return x;
}

std::vector<double> solve_direct(const LinearSystem& system) { return solve_direct(system.A, system.b); }

Solution scatter_solution(std::span<const double> x, const BoundarySpec& bc) {
  if (x.size() != bc.size())
    throw Error(ErrorCode::InvalidArgument, "solution length " + std::to_string(x.size()) +
                                                " does not match " + std::to_string(bc.size()) + " DOFs");
  Solution s;
  s.u.resize(x.size());
  s.t.resize(x.size());
  s.solved_u.resize(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (bc.kinds[d] == DofKind::TractionKnown) {
      s.u[d] = x[d];
      s.t[d] = bc.values[d];
      s.solved_u[d] = 1;
    } else {
      s.u[d] = bc.values[d];
      s.t[d] = x[d];
      s.solved_u[d] = 0;
    }
  }
  return s;
}

Vec3 equilibrium_residual(const Solution& sol, const SurfaceMesh& mesh) {
  if (sol.size() != mesh.dof_count())
    throw Error(ErrorCode::InvalidArgument, "solution does not match mesh");
  Vec3 f;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const double a = mesh[e].area;
    f += Vec3{sol.t[3 * e], sol.t[3 * e + 1], sol.t[3 * e + 2]} * a;
  }
  return f;
}

DenseMatrix precompute_inverse(const DenseMatrix& a) {
  const LuFactors f = lu_factorize(a);
  DenseMatrix inv = DenseMatrix::identity(a.rows());
  lu_solve(f, inv);
  return inv;
}

PrecomputedOperator precompute_operator(const InfluenceMatrices& hg, const BoundarySpec& bc,
                                        OperatorStorage storage) {
  LinearSystem full = apply_boundary_conditions(hg, bc);

  const std::size_t n = hg.H.rows();
  PrecomputedOperator op;
  op.kinds = bc.kinds;
  op.rhs_operator = DenseMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto h = hg.H.row(r);
    const auto g = hg.G.row(r);
    auto out = op.rhs_operator.row(r);
    for (std::size_t d = 0; d < n; ++d) out[d] = bc.kinds[d] == DofKind::TractionKnown ? g[d] : -h[d];
  }
  if (storage == OperatorStorage::ExplicitInverse)
    op.inverse = precompute_inverse(full.A);
  else
    op.factors = lu_factorize(std::move(full.A));
  return op;
}

Solution apply_precomputed(const PrecomputedOperator& op, const BoundarySpec& bc) {
  if (bc.kinds != op.kinds)
    throw Error(ErrorCode::StaleOperator,
                "boundary-condition kinds differ from the precomputed operator; recompute offline");
  const std::vector<double> b = multiply(op.rhs_operator, bc.values);
  std::vector<double> x;
  if (op.inverse) {
    x = multiply(*op.inverse, b);
  } else if (op.factors) {
    x = b;
    lu_solve(*op.factors, x);
  } else {
    throw Error(ErrorCode::InvalidArgument, "precomputed operator holds no inverse or factors");
  }
  return scatter_solution(x, bc);
}

namespace {
constexpr char kKindsMagic[8] = {'B', 'E', 'M', 'K', 'I', 'N', 'D', 'S'};
}

void save_operator(const PrecomputedOperator& op, const std::filesystem::path& path) {
  if (!op.inverse)
    throw Error(ErrorCode::InvalidArgument, "only explicit-inverse operators can be saved");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_matrix(os, *op.inverse);
  write_matrix(os, op.rhs_operator);
  const std::uint64_t n = op.kinds.size();
  os.write(kKindsMagic, sizeof kKindsMagic);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(op.kinds.data()), static_cast<std::streamsize>(n));
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

PrecomputedOperator load_operator(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  PrecomputedOperator op;
  op.inverse = read_matrix(is);
  op.rhs_operator = read_matrix(is);
  char magic[8];
  std::uint64_t n = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || std::memcmp(magic, kKindsMagic, sizeof magic) != 0)
    throw Error(ErrorCode::Parse, "missing BC-kind record in " + path.string());
  if (n != op.inverse->rows() || n != op.rhs_operator.rows())
    throw Error(ErrorCode::Parse, "BC-kind record size does not match operator");
  op.kinds.resize(n);
  is.read(reinterpret_cast<char*>(op.kinds.data()), static_cast<std::streamsize>(n));
  if (!is) throw Error(ErrorCode::Parse, "truncated BC-kind record");
  for (DofKind k : op.kinds)
    if (k != DofKind::TractionKnown && k != DofKind::DisplacementKnown)
      throw Error(ErrorCode::Parse, "invalid BC kind byte");
  return op;
}

void write_solution_csv(std::ostream& os, const Solution& sol, const SurfaceMesh& mesh) {
  if (sol.size() != mesh.dof_count())
    throw Error(ErrorCode::InvalidArgument, "solution does not match mesh");
  os << "element,cx,cy,cz,ux,uy,uz,tx,ty,tz\n" << std::setprecision(17);
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const Vec3& c = mesh[e].centroid;
    os << e << ',' << c.x << ',' << c.y << ',' << c.z;
    for (int a = 0; a < 3; ++a) os << ',' << sol.u[3 * e + a];
    for (int a = 0; a < 3; ++a) os << ',' << sol.t[3 * e + a];
    os << '\n';
  }
}

void write_solution_csv(const std::filesystem::path& path, const Solution& sol, const SurfaceMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_solution_csv(os, sol, mesh);
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace bemrt
