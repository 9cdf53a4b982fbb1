#pragma once

#include <cmath>
#include <vector>

#include "screenbem/bem/polar_quadrature.hpp"
#include "screenbem/bem/solve.hpp"
#include "screenbem/em/kernel.hpp"
#include "screenbem/em/medium.hpp"
#include "screenbem/em/plane_wave.hpp"
#include "screenbem/geometry/edge_basis.hpp"
#include "screenbem/geometry/quadrature.hpp"
#include "screenbem/types.hpp"

namespace screenbem::fields {

using em::EMField;
using geometry::EdgeBasisSet;
using geometry::ScreenMesh;

struct NearFieldOptions {
  geometry::QuadratureRule regular = geometry::quadrature_rule(7);
  int polar_points = 8;
  /// Triangles closer than near_factor diameters use the polar rule.
  Real near_factor = 3.0;
};

/// Solved density together with the mesh, basis and medium it lives on.
/// Holds references: the mesh and basis must outlive it.
class SurfaceCurrent {
 public:
  SurfaceCurrent(const EdgeBasisSet& basis, const bem::DensityVector& rho, const em::MediumParams& medium)
      : basis_(&basis), medium_(medium), coefficients_(rho.coefficients), local_(basis.densities(rho.coefficients)) {}

  const ScreenMesh& mesh() const { return basis_->mesh(); }
  const EdgeBasisSet& basis() const { return *basis_; }
  const em::MediumParams& medium() const { return medium_; }
  const CVector& coefficients() const { return coefficients_; }
  const geometry::TriangleDensity& on_triangle(std::size_t t) const { return local_[t]; }

  /// Pointwise density at y in triangle t.
  CVec3 at(std::size_t t, const Vec3& y) const { return local_[t].at(y); }

 private:
  const EdgeBasisSet* basis_;
  em::MediumParams medium_;
  CVector coefficients_;
  std::vector<geometry::TriangleDensity> local_;
};

namespace detail {

/// Per-triangle integrals at an evaluation point x:
///   i0 = int Phi, j1 = int Phi (y - x), g0 = int grad_x Phi.
struct TriangleMoments {
  Complex i0{0.0, 0.0};
  CVec3 j1 = CVec3::Zero();
  CVec3 g0 = CVec3::Zero();
};

inline void accumulate(TriangleMoments& m, const Vec3& x, const Vec3& y, Real w, Real k) {
  const Vec3 d = x - y;
  const Real r = d.norm();
  const Complex phi = w * em::phi_of_r(r, k);
  m.i0 += phi;
  m.j1 -= phi * to_complex(d);
  m.g0 += ((I * k - 1.0 / r) * phi / r) * to_complex(d);
}

}  // namespace detail

/// Scattered field of the density by the representation formulas,
///   H_sc = K(rho) = curl V(rho),
///   E_sc = -1/(i omega eps) (curl)^2 V(rho) = (i / (omega eps)) [grad V(Div rho) + k^2 V(rho)].
/// Throws SingularEvaluation for points on the screen.
inline EMField scattered_fields(const SurfaceCurrent& current, const Vec3& x,
                                const NearFieldOptions& opt = NearFieldOptions{}) {
  const ScreenMesh& mesh = current.mesh();
  const auto& frame = mesh.frame();
  const Real k = current.medium().k();
  const Real z = std::abs(frame.signed_distance(x));
  const geometry::GaussRule polar_rule = geometry::gauss_legendre(opt.polar_points);
  std::vector<geometry::MappedPoint> pts;

  CVec3 grad_v_div = CVec3::Zero();
  CVec3 v_rho = CVec3::Zero();
  CVec3 h = CVec3::Zero();
  const CVec3 xc = to_complex(x);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& dens = current.on_triangle(t);
    if (dens.g == Complex{} && dens.h.isZero(0.0)) continue;
    const std::array<Vec3, 3> tri{mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2)};
    const Real diam = mesh.diameter(t);
    const Real dist = (x - mesh.centroid(t)).norm();
    if (z <= 1e-12 * diam) {
      const Vec3 b = mesh.barycentric(t, frame.project(x));
      if (b.minCoeff() >= -1e-12) throw SingularEvaluation("scattered_fields: evaluation point lies on the screen");
    }
    detail::TriangleMoments m;
    if (dist < opt.near_factor * diam) {
      bem::polar_points(x, tri, frame.normal(), polar_rule, pts);
    } else {
      pts = geometry::map_rule(opt.regular, tri[0], tri[1], tri[2]);
    }
    for (const auto& p : pts) detail::accumulate(m, x, p.x, p.w, k);

    // rho(y) = g y - h = g (y - x) + rho(x) on this triangle, and
    // grad_x Phi is parallel to x - y, so curl V(rho) only sees rho(x).
    const CVec3 rho_x = dens.g * xc - dens.h;
    grad_v_div += dens.divergence() * m.g0;
    v_rho += dens.g * m.j1 + rho_x * m.i0;
    h += cross(m.g0, rho_x);
  }
  EMField f;
  f.H = h;
  f.E = (I / (current.medium().omega() * current.medium().epsilon())) * (grad_v_div + k * k * v_rho);
  return f;
}

/// Total field: incident plane wave plus scattered field.
inline EMField total_fields(const SurfaceCurrent& current, const em::PlaneWaveSpec& wave, const Vec3& x,
                            const NearFieldOptions& opt = NearFieldOptions{}) {
  EMField f = scattered_fields(current, x, opt);
  const EMField f0 = em::plane_wave_fields(wave, current.medium(), x);
  f.E += f0.E;
  f.H += f0.H;
  return f;
}

}  // namespace screenbem::fields
