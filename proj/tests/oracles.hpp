#pragma once

// Reference computations for the tests. Everything here is deliberately
// independent of the library's quadrature: Gauss rules come from GSL, the
// static part of the kernel is integrated in closed form, and outer
// integrals use GSL's adaptive routines.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "screenbem/types.hpp"

namespace oracle {

using screenbem::Complex;
using screenbem::CVec3;
using screenbem::Real;
using screenbem::Vec3;
using Tri = std::array<Vec3, 3>;

constexpr Real pi = screenbem::pi;

/// Gauss-Legendre on [a, b] from GSL's tables.
inline void gauss(int n, Real a, Real b, std::vector<Real>& x, std::vector<Real>& w) {
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < x.size(); ++i) gsl_integration_glfixed_point(a, b, i, &x[i], &w[i], t);
  gsl_integration_glfixed_table_free(t);
}

inline Real area(const Tri& t) { return 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm(); }

/// Points and weights of a conical-product Gauss rule on a triangle.
inline void triangle_rule(const Tri& t, int n, std::vector<Vec3>& pts, std::vector<Real>& wts) {
  std::vector<Real> x, w;
  gauss(n, 0.0, 1.0, x, w);
  const Real jac = 2.0 * area(t);
  pts.clear();
  wts.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const Real u = x[i];
      const Real v = (1.0 - u) * x[j];
      pts.push_back(t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]));
      wts.push_back(jac * w[i] * w[j] * (1.0 - u));
    }
  }
}

/// Split into four congruent children, `levels` times.
inline std::vector<Tri> subdivide(const Tri& t, int levels) {
  std::vector<Tri> cur{t};
  for (int l = 0; l < levels; ++l) {
    std::vector<Tri> next;
    for (const auto& s : cur) {
      const Vec3 m01 = 0.5 * (s[0] + s[1]), m12 = 0.5 * (s[1] + s[2]), m20 = 0.5 * (s[2] + s[0]);
      next.push_back({s[0], m01, m20});
      next.push_back({m01, s[1], m12});
      next.push_back({m20, m12, s[2]});
      next.push_back({m01, m12, m20});
    }
    cur = std::move(next);
  }
  return cur;
}

/// int_T 1/|x - y| dy and int_T (y - x)/|x - y| dy for x in the plane of T
/// (closed-form potential integrals of a flat triangle).
inline void static_integrals(const Tri& t, const Vec3& x, Real& i0, Vec3& i1) {
  const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
  i0 = 0.0;
  i1.setZero();
  for (int e = 0; e < 3; ++e) {
    const Vec3& pm = t[static_cast<std::size_t>(e)];
    const Vec3& pp = t[static_cast<std::size_t>((e + 1) % 3)];
    const Vec3 lhat = (pp - pm).normalized();
    const Vec3 uhat = lhat.cross(n);  // outward for counter-clockwise vertices
    const Real p0 = (pm - x).dot(uhat);
    const Real lp = (pp - x).dot(lhat);
    const Real lm = (pm - x).dot(lhat);
    const Real rp = (pp - x).norm();
    const Real rm = (pm - x).norm();
    const Real r0sq = p0 * p0;
    Real logterm = 0.0;
    // (R + l)(R - l) = p0^2: pick the form without cancellation.
    if (std::abs(p0) > 1e-14) logterm = lp + lm >= 0.0 ? std::log((rp + lp) / (rm + lm)) : std::log((rm - lm) / (rp - lp));
    i0 += p0 * logterm;
    i1 += 0.5 * uhat * (r0sq * logterm + lp * rp - lm * rm);
  }
}

/// int_T g(|x - y|) (1, y - x) dy for x in the plane of T and a kernel g
/// that is smooth along rays from x, by polar Gauss around x.
inline void polar_integrals(const Tri& t, const Vec3& x, const std::function<Complex(Real)>& g,
                            const std::vector<Real>& s, const std::vector<Real>& ws, Complex& j0, CVec3& j1) {
  const Vec3 nrm = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
  j0 = 0.0;
  j1.setZero();
  for (int e = 0; e < 3; ++e) {
    const Vec3 a = t[static_cast<std::size_t>(e)] - x;
    const Vec3 b = t[static_cast<std::size_t>((e + 1) % 3)] - x;
    const Real twice = a.cross(b).dot(nrm);  // signed
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec3 dir = a + s[i] * (b - a);
      const Real len = dir.norm();
      for (std::size_t j = 0; j < s.size(); ++j) {
        const Real r = s[j];
        const Vec3 d = r * dir;
        const Complex v = g(r * len) * (twice * r * ws[i] * ws[j]);
        j0 += v;
        j1 += v * d.cast<Complex>();
      }
    }
  }
}

/// Nested adaptive integral over a triangle of a real function.
inline Real adaptive_triangle(const Tri& t, const std::function<Real(const Vec3&)>& f, Real tol) {
  struct Ctx {
    const Tri* t;
    const std::function<Real(const Vec3&)>* f;
    Real u = 0.0;
    Real tol;
    gsl_integration_workspace* inner;
  };
  gsl_set_error_handler_off();
  gsl_integration_workspace* outer_ws = gsl_integration_workspace_alloc(200);
  gsl_integration_workspace* inner_ws = gsl_integration_workspace_alloc(200);
  Ctx ctx{&t, &f, 0.0, tol, inner_ws};
  auto outer = [](double u, void* p) -> double {
    auto* c = static_cast<Ctx*>(p);
    c->u = u;
    gsl_function fi{+[](double v, void* q) -> double {
                      auto* cc = static_cast<Ctx*>(q);
                      const Tri& tr = *cc->t;
                      return (*cc->f)(tr[0] + cc->u * (tr[1] - tr[0]) + v * (tr[2] - tr[0]));
                    },
                    c};
    double res = 0.0, err = 0.0;
    if (1.0 - u <= 0.0) return 0.0;
    gsl_integration_qag(&fi, 0.0, 1.0 - u, 1e-13, c->tol, 200, GSL_INTEG_GAUSS15, c->inner, &res, &err);
    return res;
  };
  gsl_function fo{+outer, &ctx};
  double res = 0.0, err = 0.0;
  gsl_integration_qag(&fo, 0.0, 1.0, 1e-13, tol, 200, GSL_INTEG_GAUSS15, outer_ws, &res, &err);
  gsl_integration_workspace_free(inner_ws);
  gsl_integration_workspace_free(outer_ws);
  return res * 2.0 * area(t);
}

/// int_A int_B Phi(x - y) [k^2 (x - pa).(y - pb) - 4] dy dx for coplanar
/// triangles A, B, Phi = e^{ikR} / (4 pi R).
///   Re Phi = 1/(4 pi R) + (cos kR - 1)/(4 pi R): closed form + polar rule,
///   Im Phi = sin(kR)/(4 pi R): smooth, plain Gauss on both triangles.
inline Complex galerkin_pair(const Tri& A, const Tri& B, const Vec3& pa, const Vec3& pb, Real k) {
  const auto g = [k](Real r) -> Complex { return r == 0.0 ? Complex(0.0) : Complex((std::cos(k * r) - 1.0) / r); };
  std::vector<Real> s, ws;
  gauss(12, 0.0, 1.0, s, ws);
  const auto real_inner = [&](const Vec3& x) {
    Real i0;
    Vec3 i1;
    static_integrals(B, x, i0, i1);
    Complex j0;
    CVec3 j1;
    polar_integrals(B, x, g, s, ws, j0, j1);
    const Real s0 = i0 + j0.real();
    const Vec3 s1 = i1 + j1.real();
    return (k * k * ((x - pa).dot(s1) + (x - pa).dot(x - pb) * s0) - 4.0 * s0) / (4.0 * pi);
  };
  const Real re = adaptive_triangle(A, real_inner, 1e-8);

  std::vector<Vec3> xa, yb;
  std::vector<Real> wa, wb;
  triangle_rule(A, 20, xa, wa);
  triangle_rule(B, 20, yb, wb);
  Real im = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    for (std::size_t j = 0; j < yb.size(); ++j) {
      const Real r = (xa[i] - yb[j]).norm();
      const Real sk = r == 0.0 ? k : std::sin(k * r) / r;
      im += wa[i] * wb[j] * sk / (4.0 * pi) * (k * k * (xa[i] - pa).dot(yb[j] - pb) - 4.0);
    }
  }
  return {re, im};
}

/// int_T e^{-i xi . y} rho(y) dy for rho(y) = g y - h, by subdivision.
inline CVec3 fourier_of_linear(const Tri& t, Complex g, const CVec3& h, const Vec3& xi, int levels = 3, int n = 8) {
  CVec3 acc = CVec3::Zero();
  std::vector<Vec3> pts;
  std::vector<Real> wts;
  for (const auto& s : subdivide(t, levels)) {
    triangle_rule(s, n, pts, wts);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const Complex ph = std::exp(Complex(0.0, -xi.dot(pts[q])));
      acc += (wts[q] * ph) * (g * pts[q].cast<Complex>() - h);
    }
  }
  return acc;
}

}  // namespace oracle
