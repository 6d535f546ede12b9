#include "bemrt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "bemrt/error.hpp"

namespace bemrt {

namespace {

// Returns (P_n(x), P_n'(x)).
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre1D gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::UnsupportedOrder, "Gauss-Legendre order must be >= 1");
  GaussLegendre1D g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

QuadratureRule gauss_rule(int n) {
  if (n != 4 && n != 8 && n != 16 && n != 32)
    throw Error(ErrorCode::UnsupportedOrder,
                "quadrature order " + std::to_string(n) + " not in {4, 8, 16, 32}");
  const GaussLegendre1D g = gauss_legendre(n);
  QuadratureRule rule;
  rule.order = n;
  rule.points.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rule.points.push_back({g.nodes[a], g.nodes[b], g.weights[a] * g.weights[b]});
  return rule;
}

void map_rule_to_triangle(const QuadratureRule& rule, const std::array<Vec3, 3>& tri,
                          std::vector<TrianglePoint>& out) {
  const Vec3 e1 = tri[1] - tri[0];
  const Vec3 e2 = tri[2] - tri[0];
  const double area = 0.5 * norm(cross(e1, e2));
  out.clear();
  out.reserve(rule.points.size());
  for (const QuadPoint2D& q : rule.points) {
    const double u = 0.5 * (1.0 + q.xi);
    const double v = 0.5 * (1.0 + q.eta);
    const Vec3 p = tri[0] + u * ((1.0 - v) * e1 + v * e2);
    // d(xi)d(eta) = 4 du dv.
    out.push_back({p, q.weight * 0.5 * area * u});
  }
}

void map_rule_to_apex_sinh(const QuadratureRule& rule, const std::array<Vec3, 3>& tri,
                           std::vector<TrianglePoint>& out) {
  const Vec3& apex = tri[0];
  const Vec3 edge = tri[2] - tri[1];
  const double len = norm(edge);
  const Vec3 et = edge * (1.0 / len);
  const double t1 = dot(tri[1] - apex, et);
  const Vec3 foot = tri[1] - t1 * et;
  const double h = norm(foot - apex);
  if (!(h > 0.0)) throw Error(ErrorCode::DegenerateElement, "apex lies on the opposite edge");
  const double u1 = std::asinh(t1 / h);
  const double u2 = std::asinh((t1 + len) / h);
  out.clear();
  out.reserve(rule.points.size());
  for (const QuadPoint2D& q : rule.points) {
    const double s = 0.5 * (1.0 + q.xi);
    const double u = u1 + 0.5 * (1.0 + q.eta) * (u2 - u1);
    const Vec3 on_edge = foot + (h * std::sinh(u)) * et;
    // dA = s h^2 cosh(u) ds du, ds du = (u2 - u1) / 4 dxi deta.
    out.push_back({apex + s * (on_edge - apex), q.weight * 0.25 * (u2 - u1) * s * h * h * std::cosh(u)});
  }
}

std::vector<TrianglePoint> map_rule_to_triangle(const QuadratureRule& rule, const Element& element) {
  if (element.degenerate)
    throw Error(ErrorCode::DegenerateElement, "cannot integrate over a degenerate element");
  std::vector<TrianglePoint> out;
  map_rule_to_triangle(rule, element.vertices, out);
  return out;
}

}  // namespace bemrt
