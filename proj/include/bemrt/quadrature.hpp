#pragma once

#include <array>
#include <span>
#include <vector>

#include "bemrt/mesh.hpp"

namespace bemrt {

struct GaussLegendre1D {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
};

/// Gauss-Legendre nodes and weights on [-1, 1] for any n >= 1, computed by
/// Newton iteration on the Legendre recurrence.
GaussLegendre1D gauss_legendre(int n);

struct QuadPoint2D {
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;
};

/// Tensor-product rule on the reference square [-1,1]^2.
struct QuadratureRule {
  int order = 0;
  std::vector<QuadPoint2D> points;  // order^2 entries, xi-major
};

/// Orders 4, 8, 16 and 32 are supported; anything else throws UnsupportedOrder.
QuadratureRule gauss_rule(int n);

struct TrianglePoint {
  Vec3 point;
  double weight = 0.0;  // mm^2
};

/// Collapsed-square map of the reference square onto the triangle
/// (apex, b, c); the edge xi = -1 shrinks onto `apex`.
///   x(u, v) = apex + u [(1 - v)(b - apex) + v (c - apex)],  u, v = (1 + xi, 1 + eta) / 2
///   dA = 2 A u du dv
void map_rule_to_triangle(const QuadratureRule& rule, const std::array<Vec3, 3>& apex_b_c,
                          std::vector<TrianglePoint>& out);

/// Maps onto an element with the collapsed vertex at vertices[0]. Throws
/// DegenerateElement for a degenerate element.
std::vector<TrianglePoint> map_rule_to_triangle(const QuadratureRule& rule, const Element& element);

/// Collapsed map for integrands with a 1/r singularity at the apex. The
/// first rule coordinate runs radially from the apex, the second along the
/// opposite edge with t = h sinh(u), where h is the apex-to-edge distance and
/// t the position measured from the foot of the perpendicular. The Jacobian
/// cancels 1/r and the edge distance no longer produces a near-singularity.
void map_rule_to_apex_sinh(const QuadratureRule& rule, const std::array<Vec3, 3>& apex_b_c,
                           std::vector<TrianglePoint>& out);

}  // namespace bemrt
