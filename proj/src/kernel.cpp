#include "bemrt/kernel.hpp"

#include <cmath>
#include <numbers>

#include "bemrt/error.hpp"

namespace bemrt {

Material make_material(double E, double nu) {
  if (!(E > 0.0) || !std::isfinite(E))
    throw Error(ErrorCode::InvalidMaterial, "Young's modulus must be positive and finite");
  if (!(nu > -1.0 && nu < 0.5))
    throw Error(ErrorCode::InvalidMaterial, "Poisson's ratio must lie in (-1, 0.5)");
  return Material{E, nu, E / (2.0 * (1.0 + nu))};
}

Mat3 kelvin_U(const Vec3& source, const Vec3& field, const Material& mat) {
  const Vec3 d = field - source;
  const double r = norm(d);
  if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "U kernel evaluated at r = 0");
  const double dr[3] = {d.x / r, d.y / r, d.z / r};
  const double c = 1.0 / (16.0 * std::numbers::pi * mat.mu * (1.0 - mat.nu) * r);
  const double diag = 3.0 - 4.0 * mat.nu;
  Mat3 u;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) u[i][j] = c * ((i == j ? diag : 0.0) + dr[i] * dr[j]);
  return u;
}

Mat3 kelvin_T(const Vec3& source, const Vec3& field, const Vec3& n, const Material& mat) {
  const Vec3 d = field - source;
  const double r = norm(d);
  if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "T kernel evaluated at r = 0");
  const double dr[3] = {d.x / r, d.y / r, d.z / r};
  const double nn[3] = {n.x, n.y, n.z};
  const double drdn = dr[0] * nn[0] + dr[1] * nn[1] + dr[2] * nn[2];
  const double a = 1.0 - 2.0 * mat.nu;
  const double c = -1.0 / (8.0 * std::numbers::pi * (1.0 - mat.nu) * r * r);
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t[i][j] = c * (drdn * ((i == j ? a : 0.0) + 3.0 * dr[i] * dr[j]) -
                     a * (dr[i] * nn[j] - dr[j] * nn[i]));
  return t;
}

}  // namespace bemrt
