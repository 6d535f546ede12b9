#pragma once

#include "bemrt/vec3.hpp"

namespace bemrt {

/// Isotropic linear elastic material. Units: N/mm^2 for moduli.
struct Material {
  double E = 0.0;
  double nu = 0.0;
  double mu = 0.0;
};

/// Requires E > 0 and -1 < nu < 0.5; mu = E / (2(1 + nu)).
Material make_material(double E, double nu);

/// Kelvin displacement kernel: displacement at `field` per unit point load at
/// `source`.
///   U_ij = [(3 - 4nu) d_ij + r_i r_j] / (16 pi mu (1 - nu) r)
/// Throws SingularEvaluation when the points coincide.
Mat3 kelvin_U(const Vec3& source, const Vec3& field, const Material& mat);

/// Kelvin traction kernel with the unit normal taken at `field`.
///   T_ij = -1/(8 pi (1-nu) r^2) * { dr/dn [(1-2nu) d_ij + 3 r_i r_j]
///                                   - (1-2nu)(r_i n_j - r_j n_i) }
/// Throws SingularEvaluation when the points coincide.
Mat3 kelvin_T(const Vec3& source, const Vec3& field, const Vec3& normal_at_field,
              const Material& mat);

}  // namespace bemrt
