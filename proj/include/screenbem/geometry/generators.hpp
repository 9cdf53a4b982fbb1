#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "screenbem/geometry/plane_frame.hpp"
#include "screenbem/geometry/screen_mesh.hpp"

namespace screenbem::geometry {

/// Structured a x b rectangle centered at the frame origin, sides along the
/// frame tangents. Each of the nx * ny cells is cut along its rising diagonal.
inline ScreenMesh make_rectangle_screen(Real a, Real b, int nx, int ny, const PlaneFrame& frame) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("make_rectangle_screen: sides must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("make_rectangle_screen: cell counts must be >= 1");

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      vertices.push_back(frame.point(-0.5 * a + a * i / nx, -0.5 * b + b * j / ny));
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return {std::move(vertices), std::move(triangles), frame};
}

/// Number of triangles produced by make_disk_screen at a refinement level.
inline std::size_t disk_triangle_count(int n_refine) { return std::size_t{6} << (2 * n_refine); }

/// Disk of radius r centered at the frame origin. A regular hexagon (six
/// triangles around the center) is refined n_refine times by midpoint
/// subdivision, then every vertex is pushed radially so the hexagon boundary
/// lands on the circle. Produces disk_triangle_count(n_refine) triangles.
inline ScreenMesh make_disk_screen(Real r, int n_refine, const PlaneFrame& frame) {
  if (!(r > 0.0)) throw std::invalid_argument("make_disk_screen: radius must be positive");
  if (n_refine < 0 || n_refine > 8) throw std::invalid_argument("make_disk_screen: refinement must be in [0, 8]");

  std::vector<Vec2> pts{{0.0, 0.0}};
  for (int k = 0; k < 6; ++k) pts.emplace_back(std::cos(k * pi / 3.0), std::sin(k * pi / 3.0));
  std::vector<Triangle> tris;
  for (int k = 0; k < 6; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 6});

  for (int level = 0; level < n_refine; ++level) {
    std::map<std::pair<int, int>, int> mid;
    const auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = mid.try_emplace({key.first, key.second}, static_cast<int>(pts.size()));
      if (inserted) pts.push_back(0.5 * (pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
      return it->second;
    };
    std::vector<Triangle> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const int m01 = midpoint(t[0], t[1]);
      const int m12 = midpoint(t[1], t[2]);
      const int m20 = midpoint(t[2], t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m01, m12, m20});
    }
    tris = std::move(next);
  }

  std::vector<Vec3> vertices;
  vertices.reserve(pts.size());
  const Real apothem = std::cos(pi / 6.0);
  for (const auto& p : pts) {
    const Real rho = p.norm();
    if (rho == 0.0) {
      vertices.push_back(frame.point(0.0, 0.0));
      continue;
    }
    const Real phi = std::atan2(p.y(), p.x());
    Real sector = std::fmod(phi, pi / 3.0);
    if (sector < 0.0) sector += pi / 3.0;
    const Real hex_radius = apothem / std::cos(sector - pi / 6.0);
    const Real scale = r / hex_radius;
    vertices.push_back(frame.point(scale * p.x(), scale * p.y()));
  }
  return {std::move(vertices), std::move(tris), frame};
}

}  // namespace screenbem::geometry
