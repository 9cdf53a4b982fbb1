#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "screenbem/bem/polar_quadrature.hpp"
#include "screenbem/em/kernel.hpp"
#include "screenbem/em/medium.hpp"
#include "screenbem/geometry/edge_basis.hpp"
#include "screenbem/geometry/quadrature.hpp"
#include "screenbem/geometry/screen_mesh.hpp"
#include "screenbem/types.hpp"

namespace screenbem::bem {

using geometry::EdgeBasisSet;
using geometry::QuadratureRule;
using geometry::ScreenMesh;

/// Galerkin matrix of the electric-field operator on the edge basis,
///   A_mn = int int Phi(x - y) [k^2 b_m(x) . b_n(y) - Div b_m(x) Div b_n(y)],
/// i.e. the hypersingular operator after moving one surface divergence onto
/// each of test and trial function. Complex symmetric.
struct SystemMatrix {
  CMatrix A;
  em::MediumParams medium;
};

/// Quadrature settings for assembly.
///
/// Triangle pairs sharing a vertex, an edge, or the whole triangle use the
/// four-dimensional singularity-cancelling transforms of Sauter and Schwab
/// with `touching_points` Gauss nodes per coordinate. Other pairs closer than
/// near_factor times the larger diameter use `singular_outer` on the test
/// triangle and the polar rule (`polar_points` per panel) on the trial
/// triangle; well-separated pairs use `regular` on both.
struct AssemblyOptions {
  QuadratureRule regular = geometry::quadrature_rule(5);
  QuadratureRule singular_outer = geometry::quadrature_rule(8);
  int polar_points = 6;
  int touching_points = 6;
  Real near_factor = 2.0;

  /// Settings refined together with a regular rule, so that entries
  /// converge as `rule` is refined.
  static AssemblyOptions from_rule(const QuadratureRule& rule) {
    AssemblyOptions o;
    o.regular = rule;
    o.singular_outer = geometry::quadrature_rule(std::min(geometry::kMaxQuadratureOrder, rule.degree + 3));
    o.polar_points = rule.degree / 2 + 4;
    o.touching_points = rule.degree / 2 + 4;
    return o;
  }
};

namespace detail {

/// Kernel-weighted moments of a triangle pair, with x and y measured from
/// the centroids of their own triangles:
///   s0 = sum w Phi, sx = sum w Phi x, sy = sum w Phi y, sxy = sum w Phi x.y
struct PairMoments {
  Complex s0{0.0, 0.0};
  CVec3 sx = CVec3::Zero();
  CVec3 sy = CVec3::Zero();
  Complex sxy{0.0, 0.0};

  void add(Complex kw, const Vec3& xl, const Vec3& yl) {
    s0 += kw;
    sx += kw * to_complex(xl);
    sy += kw * to_complex(yl);
    sxy += kw * xl.dot(yl);
  }
};

inline std::array<Vec3, 3> corners(const ScreenMesh& mesh, std::size_t t) {
  return {mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2)};
}

inline bool is_near_pair(const ScreenMesh& mesh, std::size_t a, std::size_t b, Real near_factor) {
  // Uniform meshes put many pairs exactly on the threshold; the margin keeps
  // their classification stable under rigid motions.
  const Real d = (mesh.centroid(a) - mesh.centroid(b)).norm();
  return d < near_factor * std::max(mesh.diameter(a), mesh.diameter(b)) * (1.0 + 1e-9);
}

/// Vertex indices of a and b reordered so that the shared vertices come
/// first in both; returns the number of shared vertices.
inline int touching_order(const ScreenMesh& mesh, std::size_t a, std::size_t b, std::array<int, 3>& oa,
                          std::array<int, 3>& ob) {
  const auto& ta = mesh.triangles()[a];
  const auto& tb = mesh.triangles()[b];
  int shared = 0;
  std::array<bool, 3> used_a{}, used_b{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (ta[static_cast<std::size_t>(i)] == tb[static_cast<std::size_t>(j)]) {
        oa[static_cast<std::size_t>(shared)] = i;
        ob[static_cast<std::size_t>(shared)] = j;
        used_a[static_cast<std::size_t>(i)] = used_b[static_cast<std::size_t>(j)] = true;
        ++shared;
      }
    }
  }
  int ia = shared, ib = shared;
  for (int i = 0; i < 3; ++i) {
    if (!used_a[static_cast<std::size_t>(i)]) oa[static_cast<std::size_t>(ia++)] = i;
    if (!used_b[static_cast<std::size_t>(i)]) ob[static_cast<std::size_t>(ib++)] = i;
  }
  return shared;
}

/// Calls f(xhat, yhat, w) for the Sauter-Schwab rule on the reference
/// triangle {0 <= x2 <= x1 <= 1}; the singular set is the whole triangle
/// (shared = 3), the edge (0,0)-(1,0) (shared = 2) or the vertex (0,0)
/// (shared = 1). Weights integrate over both reference triangles.
template <class F>
void sauter_schwab(int shared, const GaussRule& g, F&& f) {
  const std::size_t n = g.nodes.size();
  for (std::size_t a = 0; a < n; ++a) {
    const Real xi = g.nodes[a];
    for (std::size_t b = 0; b < n; ++b) {
      const Real e1 = g.nodes[b];
      for (std::size_t c = 0; c < n; ++c) {
        const Real e2 = g.nodes[c];
        for (std::size_t d = 0; d < n; ++d) {
          const Real e3 = g.nodes[d];
          const Real w = g.weights[a] * g.weights[b] * g.weights[c] * g.weights[d];
          if (shared == 3) {
            const Real wc = w * xi * xi * xi * e1 * e1 * e2;
            f(Vec2(xi, xi * (1 - e1 + e1 * e2)), Vec2(xi * (1 - e1 * e2 * e3), xi * (1 - e1)), wc);
            f(Vec2(xi * (1 - e1 * e2 * e3), xi * (1 - e1)), Vec2(xi, xi * (1 - e1 + e1 * e2)), wc);
            f(Vec2(xi, xi * e1 * (1 - e2 + e2 * e3)), Vec2(xi * (1 - e1 * e2), xi * e1 * (1 - e2)), wc);
            f(Vec2(xi * (1 - e1 * e2), xi * e1 * (1 - e2)), Vec2(xi, xi * e1 * (1 - e2 + e2 * e3)), wc);
            f(Vec2(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), Vec2(xi, xi * e1 * (1 - e2)), wc);
            f(Vec2(xi, xi * e1 * (1 - e2)), Vec2(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), wc);
          } else if (shared == 2) {
            const Real w1 = w * xi * xi * xi * e1 * e1;
            const Real w2 = w1 * e2;
            f(Vec2(xi, xi * e1 * e3), Vec2(xi * (1 - e1 * e2), xi * e1 * (1 - e2)), w1);
            f(Vec2(xi, xi * e1), Vec2(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3)), w2);
            f(Vec2(xi * (1 - e1 * e2), xi * e1 * (1 - e2)), Vec2(xi, xi * e1 * e2 * e3), w2);
            f(Vec2(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3)), Vec2(xi, xi * e1), w2);
            f(Vec2(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), Vec2(xi, xi * e1 * e2), w2);
          } else {
            const Real wv = w * xi * xi * xi * e2;
            f(Vec2(xi, xi * e1), Vec2(xi * e2, xi * e2 * e3), wv);
            f(Vec2(xi * e2, xi * e2 * e3), Vec2(xi, xi * e1), wv);
          }
        }
      }
    }
  }
}

inline PairMoments pair_moments(const ScreenMesh& mesh, std::size_t ta, std::size_t tb, Real k,
                                const AssemblyOptions& opt, const GaussRule& polar_rule,
                                const GaussRule& touching_rule, std::vector<MappedPoint>& scratch) {
  PairMoments m;
  const Vec3 ca = mesh.centroid(ta);
  const Vec3 cb = mesh.centroid(tb);
  const auto A = corners(mesh, ta);
  const auto B = corners(mesh, tb);
  std::array<int, 3> oa{}, ob{};
  const int shared = touching_order(mesh, ta, tb, oa, ob);
  if (shared > 0) {
    // x = P0 + x1 (P1 - P0) + x2 (P2 - P1), Jacobian 2 |T|.
    const Vec3& a0 = A[static_cast<std::size_t>(oa[0])];
    const Vec3 a1 = A[static_cast<std::size_t>(oa[1])] - a0;
    const Vec3 a2 = A[static_cast<std::size_t>(oa[2])] - A[static_cast<std::size_t>(oa[1])];
    const Vec3& b0 = B[static_cast<std::size_t>(ob[0])];
    const Vec3 b1 = B[static_cast<std::size_t>(ob[1])] - b0;
    const Vec3 b2 = B[static_cast<std::size_t>(ob[2])] - B[static_cast<std::size_t>(ob[1])];
    const Real jac = 4.0 * mesh.area(ta) * mesh.area(tb);
    sauter_schwab(shared, touching_rule, [&](const Vec2& xh, const Vec2& yh, Real w) {
      const Vec3 x = a0 + xh.x() * a1 + xh.y() * a2;
      const Vec3 y = b0 + yh.x() * b1 + yh.y() * b2;
      m.add(w * jac * em::phi_of_r((x - y).norm(), k), x - ca, y - cb);
    });
  } else if (is_near_pair(mesh, ta, tb, opt.near_factor)) {
    const Vec3& normal = mesh.frame().normal();
    for (const auto& px : geometry::map_rule(opt.singular_outer, A[0], A[1], A[2])) {
      polar_points(px.x, B, normal, polar_rule, scratch);
      const Vec3 xl = px.x - ca;
      for (const auto& py : scratch) {
        const Real r = (px.x - py.x).norm();
        m.add(px.w * py.w * em::phi_of_r(r, k), xl, py.x - cb);
      }
    }
  } else {
    const auto xs = geometry::map_rule(opt.regular, A[0], A[1], A[2]);
    const auto ys = geometry::map_rule(opt.regular, B[0], B[1], B[2]);
    for (const auto& px : xs) {
      const Vec3 xl = px.x - ca;
      for (const auto& py : ys) {
        const Real r = (px.x - py.x).norm();
        m.add(px.w * py.w * em::phi_of_r(r, k), xl, py.x - cb);
      }
    }
  }
  return m;
}

/// 3x3 interaction of the local basis functions of triangles ta and tb;
/// entry (i, j) pairs local edge i of ta with local edge j of tb, without the
/// +-1 orientation signs.
inline std::array<std::array<Complex, 3>, 3> local_block(const ScreenMesh& mesh, std::size_t ta, std::size_t tb,
                                                         Real k, const PairMoments& m) {
  const Vec3 ca = mesh.centroid(ta);
  const Vec3 cb = mesh.centroid(tb);
  std::array<std::array<Complex, 3>, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const Vec3 pa = mesh.vertex(ta, i) - ca;
    for (int j = 0; j < 3; ++j) {
      const Vec3 pb = mesh.vertex(tb, j) - cb;
      // int int Phi (x - pa).(y - pb)
      const Complex dot_term = m.sxy - to_complex(pb).dot(m.sx) - to_complex(pa).dot(m.sy) + pa.dot(pb) * m.s0;
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = k * k * dot_term - 4.0 * m.s0;
    }
  }
  return out;
}

}  // namespace detail

inline SystemMatrix assemble_system(const ScreenMesh& mesh, const EdgeBasisSet& basis,
                                    const em::MediumParams& medium, const AssemblyOptions& opt) {
  if (basis.empty()) throw std::invalid_argument("assemble_system: basis has no interior edges");
  if (&basis.mesh() != &mesh) throw std::invalid_argument("assemble_system: basis was built on a different mesh");

  const auto n = static_cast<Eigen::Index>(basis.size());
  const std::size_t ntri = mesh.num_triangles();
  const Real k = medium.k();
  const GaussRule polar_rule = geometry::gauss_legendre(opt.polar_points);
  const GaussRule touching_rule = geometry::gauss_legendre(opt.touching_points);
  SystemMatrix sys{CMatrix::Zero(n, n), medium};

  // Per-triangle scale factor l / (2A) of each local basis function.
  const auto coeff = [&](std::size_t t, const geometry::LocalBasis& lb) {
    return lb.sign * basis[static_cast<std::size_t>(lb.basis)].length / (2.0 * mesh.area(t));
  };

  // Blocks for pairs (ta, tb) with tb >= ta are computed in parallel per ta
  // into a buffer, then scattered serially in a fixed order; the (tb, ta)
  // block is the transpose, which makes A symmetric to rounding.
  constexpr std::size_t chunk = 32;
  using Block = std::array<std::array<Complex, 3>, 3>;
  std::vector<std::vector<Block>> buffer(chunk);
  for (std::size_t start = 0; start < ntri; start += chunk) {
    const std::size_t stop = std::min(ntri, start + chunk);
#pragma omp parallel
    {
      std::vector<MappedPoint> scratch;
#pragma omp for schedule(dynamic)
      for (std::ptrdiff_t ti = static_cast<std::ptrdiff_t>(start); ti < static_cast<std::ptrdiff_t>(stop); ++ti) {
        const auto ta = static_cast<std::size_t>(ti);
        auto& row = buffer[ta - start];
        row.assign(ntri - ta, Block{});
        if (basis.on_triangle(ta).empty()) continue;
        for (std::size_t tb = ta; tb < ntri; ++tb) {
          if (basis.on_triangle(tb).empty()) continue;
          const auto m = detail::pair_moments(mesh, ta, tb, k, opt, polar_rule, touching_rule, scratch);
          row[tb - ta] = detail::local_block(mesh, ta, tb, k, m);
          if (tb == ta) {
            auto& blk = row[0];
            for (std::size_t i = 0; i < 3; ++i) {
              for (std::size_t j = i + 1; j < 3; ++j) {
                const Complex avg = 0.5 * (blk[i][j] + blk[j][i]);
                blk[i][j] = avg;
                blk[j][i] = avg;
              }
            }
          }
        }
      }
    }
    for (std::size_t ta = start; ta < stop; ++ta) {
      const auto& row = buffer[ta - start];
      for (std::size_t tb = ta; tb < ntri; ++tb) {
        const Block& blk = row[tb - ta];
        for (const auto& la : basis.on_triangle(ta)) {
          const Real fa = coeff(ta, la);
          for (const auto& lb : basis.on_triangle(tb)) {
            const Complex v = fa * coeff(tb, lb) *
                              blk[static_cast<std::size_t>(la.local)][static_cast<std::size_t>(lb.local)];
            sys.A(la.basis, lb.basis) += v;
            if (tb != ta) sys.A(lb.basis, la.basis) += v;
          }
        }
      }
    }
  }
  return sys;
}

/// Assembly with settings derived from a regular rule (order >= 2).
inline SystemMatrix assemble_system(const ScreenMesh& mesh, const EdgeBasisSet& basis,
                                    const em::MediumParams& medium, const QuadratureRule& quad) {
  if (quad.degree < 2) throw std::invalid_argument("assemble_system: quadrature order must be >= 2");
  return assemble_system(mesh, basis, medium, AssemblyOptions::from_rule(quad));
}

inline SystemMatrix assemble_system(const ScreenMesh& mesh, const EdgeBasisSet& basis,
                                    const em::MediumParams& medium) {
  return assemble_system(mesh, basis, medium, AssemblyOptions{});
}

}  // namespace screenbem::bem
