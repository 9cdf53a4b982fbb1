#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "screenbem/types.hpp"

namespace screenbem::geometry {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(pi * (i + 0.75) / (n + 0.5));
    Real dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Real p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    Real p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const Real p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

/// Rule on the reference triangle (0,0), (1,0), (0,1). A point (xi, eta)
/// maps to v0 + xi (v1 - v0) + eta (v2 - v0); weights sum to 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<Real> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxQuadratureOrder = 30;

/// Rule exact for polynomials of total degree <= order. Orders 1, 2 and 5
/// are the classical symmetric rules; all others up to kMaxQuadratureOrder
/// use a collapsed (Duffy) tensor Gauss rule.
inline QuadratureRule quadrature_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw std::invalid_argument("quadrature_rule: unsupported order " + std::to_string(order));
  }
  QuadratureRule q;
  q.degree = order;
  if (order == 1) {
    q.points = {{1.0 / 3.0, 1.0 / 3.0}};
    q.weights = {0.5};
    return q;
  }
  if (order == 2) {
    q.points = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
    q.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return q;
  }
  if (order == 5) {
    const Real s15 = std::sqrt(15.0);
    const Real a = (6.0 - s15) / 21.0;
    const Real b = (6.0 + s15) / 21.0;
    const Real wa = (155.0 - s15) / 2400.0;
    const Real wb = (155.0 + s15) / 2400.0;
    q.points = {{1.0 / 3.0, 1.0 / 3.0}, {a, a}, {1.0 - 2.0 * a, a}, {a, 1.0 - 2.0 * a},
                {b, b}, {1.0 - 2.0 * b, b}, {b, 1.0 - 2.0 * b}};
    q.weights = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
    return q;
  }
  const int n = (order + 3) / 2;
  const GaussRule g = gauss_legendre(n);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const Real u = g.nodes[i];
      q.points.emplace_back(u, g.nodes[j] * (1.0 - u));
      q.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return q;
}

/// Quadrature points mapped onto a physical triangle; weights include the area.
struct MappedPoint {
  Vec3 x;
  Real w;
};

inline std::vector<MappedPoint> map_rule(const QuadratureRule& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Real jac = e1.cross(e2).norm();
  std::vector<MappedPoint> out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.push_back({a + q.points[i].x() * e1 + q.points[i].y() * e2, q.weights[i] * jac});
  }
  return out;
}

}  // namespace screenbem::geometry
