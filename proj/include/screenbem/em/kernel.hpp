#pragma once

#include <cmath>

#include "screenbem/types.hpp"

namespace screenbem::em {

/// Outgoing fundamental solution of the Helmholtz operator as a function of
/// the distance r > 0: exp(ikr) / (4 pi r).
inline Complex phi_of_r(Real r, Real k) { return std::exp(I * (k * r)) / (4.0 * pi * r); }

inline Complex helmholtz_phi(const Vec3& x, const Vec3& y, Real k) {
  const Real r = (x - y).norm();
  if (r == 0.0) throw SingularEvaluation("helmholtz_phi: x == y");
  return phi_of_r(r, k);
}

/// Gradient with respect to x: (ik - 1/r) Phi (x - y) / r.
inline CVec3 grad_phi(const Vec3& x, const Vec3& y, Real k) {
  const Vec3 d = x - y;
  const Real r = d.norm();
  if (r == 0.0) throw SingularEvaluation("grad_phi: x == y");
  const Complex factor = (I * k - 1.0 / r) * phi_of_r(r, k) / r;
  return factor * to_complex(d);
}

}  // namespace screenbem::em
