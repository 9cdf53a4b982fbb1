#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "screenbem/geometry/quadrature.hpp"
#include "screenbem/types.hpp"

namespace screenbem::bem {

using geometry::GaussRule;
using geometry::MappedPoint;

/// Gauss nodes on [0, len] refined geometrically toward 0 down to `scale`.
/// With scale >= len / 4, or scale <= 0 (exact singularity cancellation),
/// this is a single Gauss panel.
inline void graded_nodes(Real len, Real scale, const GaussRule& g, std::vector<Real>& nodes,
                         std::vector<Real>& weights) {
  nodes.clear();
  weights.clear();
  constexpr Real ratio = 0.25;
  Real hi = len;
  const auto panel = [&](Real a, Real b) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      nodes.push_back(a + (b - a) * g.nodes[i]);
      weights.push_back((b - a) * g.weights[i]);
    }
  };
  if (scale <= 0.0) {
    panel(0.0, len);
    return;
  }
  const Real floor_scale = std::max(scale, 1e-14 * len);
  while (hi * ratio > 0.5 * floor_scale) {
    panel(hi * ratio, hi);
    hi *= ratio;
  }
  panel(0.0, hi);
}

/// Closest point of triangle (a, b, c) to a point p lying in its plane.
inline Vec3 closest_point_in_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const Real d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const Real d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const Real vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const Real d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const Real vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const Real va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const Real denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Quadrature over a flat triangle for integrands singular or nearly
/// singular at a point x near the triangle's plane.
///
/// The triangle is split into three sub-triangles with a common apex (the
/// projection of x, or the closest point of the triangle when the projection
/// falls outside) and each sub-triangle is mapped from the unit square by
/// y = apex + s (a - apex + t (b - a)). The Jacobian factor s cancels a 1/R
/// singularity at the apex. Radial and angular directions are refined
/// geometrically toward the apex and toward the foot of the perpendicular
/// when x is close.
///
/// `normal` is the triangle's unit normal; weights include the Jacobian.
inline void polar_points(const Vec3& x, const std::array<Vec3, 3>& tri, const Vec3& normal, const GaussRule& g,
                         std::vector<MappedPoint>& out) {
  out.clear();
  const Real height = std::abs(normal.dot(x - tri[0]));
  const Vec3 projected = x - normal.dot(x - tri[0]) * normal;
  const Vec3 apex = closest_point_in_triangle(projected, tri[0], tri[1], tri[2]);
  const Real diam = std::max({(tri[0] - tri[1]).norm(), (tri[1] - tri[2]).norm(), (tri[2] - tri[0]).norm()});
  Real scale = std::hypot(height, (projected - apex).norm());
  if (scale < 1e-12 * diam) scale = 0.0;

  std::vector<Real> s_nodes, s_weights, t_nodes, t_weights, tmp_n, tmp_w;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = tri[static_cast<std::size_t>(i)];
    const Vec3& b = tri[static_cast<std::size_t>((i + 1) % 3)];
    const Vec3 ax = a - apex;
    const Vec3 ab = b - a;
    const Real twice_area = ax.cross(ab).dot(normal);
    if (!(twice_area > 1e-14 * diam * diam)) continue;

    // Angular panels split at the foot of the perpendicular from the apex
    // onto edge ab, graded toward it by the apex-to-edge distance.
    const Real ab2 = ab.squaredNorm();
    const Real foot = std::clamp(-ax.dot(ab) / ab2, 0.0, 1.0);
    const Real edge_len = std::sqrt(ab2);
    const Real dist_to_edge = twice_area / edge_len;
    const Real t_scale = std::max(dist_to_edge, scale) / edge_len;
    t_nodes.clear();
    t_weights.clear();
    if (foot > 0.0) {
      graded_nodes(foot, t_scale, g, tmp_n, tmp_w);
      for (std::size_t k = 0; k < tmp_n.size(); ++k) {
        t_nodes.push_back(foot - tmp_n[k]);
        t_weights.push_back(tmp_w[k]);
      }
    }
    if (foot < 1.0) {
      graded_nodes(1.0 - foot, t_scale, g, tmp_n, tmp_w);
      for (std::size_t k = 0; k < tmp_n.size(); ++k) {
        t_nodes.push_back(foot + tmp_n[k]);
        t_weights.push_back(tmp_w[k]);
      }
    }

    for (std::size_t k = 0; k < t_nodes.size(); ++k) {
      const Vec3 dir = ax + t_nodes[k] * ab;
      const Real len = dir.norm();
      graded_nodes(1.0, scale / len, g, s_nodes, s_weights);
      for (std::size_t m = 0; m < s_nodes.size(); ++m) {
        const Real s = s_nodes[m];
        out.push_back({apex + s * dir, twice_area * s * s_weights[m] * t_weights[k]});
      }
    }
  }
}

}  // namespace screenbem::bem
