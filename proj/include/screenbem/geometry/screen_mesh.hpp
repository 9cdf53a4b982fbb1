#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "screenbem/geometry/plane_frame.hpp"
#include "screenbem/types.hpp"

namespace screenbem::geometry {

using Triangle = std::array<int, 3>;

/// Mesh edge. Local edge i of a triangle is the one opposite its vertex i.
struct Edge {
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> triangles{-1, -1};
  std::array<int, 2> local{-1, -1};

  bool interior() const { return triangles[1] >= 0; }
};

/// Flat triangulated screen lying in the plane of its frame.
///
/// Construction validates the invariants: vertices on the plane, every
/// triangle non-degenerate with geometric normal equal to the frame normal,
/// every edge shared by one or two triangles, and edge-connectivity.
class ScreenMesh {
 public:
  ScreenMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles, PlaneFrame frame)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)), frame_(frame) {
    validate_and_build();
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const PlaneFrame& frame() const { return frame_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  /// Global edge index of local edge `i` of triangle `t`.
  int triangle_edge(std::size_t t, int i) const { return triangle_edges_[t][static_cast<std::size_t>(i)]; }

  const Vec3& vertex(std::size_t t, int i) const {
    return vertices_[static_cast<std::size_t>(triangles_[t][static_cast<std::size_t>(i)])];
  }

  Real area(std::size_t t) const { return areas_[t]; }

  Real total_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

  Vec3 centroid(std::size_t t) const { return (vertex(t, 0) + vertex(t, 1) + vertex(t, 2)) / 3.0; }

  /// Longest edge of triangle t.
  Real diameter(std::size_t t) const {
    return std::max({(vertex(t, 0) - vertex(t, 1)).norm(), (vertex(t, 1) - vertex(t, 2)).norm(),
                     (vertex(t, 2) - vertex(t, 0)).norm()});
  }

  /// Mesh size h: the longest edge in the mesh.
  Real mesh_size() const {
    Real h = 0.0;
    for (std::size_t t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
    return h;
  }

  std::size_t num_interior_edges() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.interior(); }));
  }

  std::size_t num_boundary_edges() const { return edges_.size() - num_interior_edges(); }

  /// Maps a point in triangle t to barycentric coordinates.
  Vec3 barycentric(std::size_t t, const Vec3& x) const {
    const Vec3& a = vertex(t, 0);
    const Vec3 e1 = vertex(t, 1) - a;
    const Vec3 e2 = vertex(t, 2) - a;
    const Vec3 r = x - a;
    const Real d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    const Real r1 = r.dot(e1), r2 = r.dot(e2);
    const Real det = d11 * d22 - d12 * d12;
    const Real l1 = (d22 * r1 - d12 * r2) / det;
    const Real l2 = (d11 * r2 - d12 * r1) / det;
    return {1.0 - l1 - l2, l1, l2};
  }

  /// Triangle containing the projection of x onto the plane, or -1.
  int locate(const Vec3& x, Real tol = 1e-12) const {
    const Vec3 p = frame_.project(x);
    for (std::size_t t = 0; t < num_triangles(); ++t) {
      const Vec3 b = barycentric(t, p);
      if (b.minCoeff() >= -tol) return static_cast<int>(t);
    }
    return -1;
  }

  /// Largest distance of any vertex from the frame origin.
  Real radius() const {
    Real r = 0.0;
    const Vec3 o = frame_.origin();
    for (const auto& v : vertices_) r = std::max(r, (v - o).norm());
    return r;
  }

  /// Rigid translation of every vertex (the frame follows).
  ScreenMesh translated(const Vec3& shift) const {
    std::vector<Vec3> moved = vertices_;
    for (auto& v : moved) v += shift;
    return {std::move(moved), triangles_, frame_.translated(shift)};
  }

  /// Rigid rotation about the coordinate origin.
  ScreenMesh rotated(const Eigen::Matrix3d& rotation) const {
    std::vector<Vec3> moved = vertices_;
    for (auto& v : moved) v = rotation * v;
    return {std::move(moved), triangles_, PlaneFrame(rotation * frame_.normal(), frame_.offset())};
  }

 private:
  void validate_and_build() {
    const auto nv = static_cast<int>(vertices_.size());
    if (triangles_.empty()) throw std::invalid_argument("ScreenMesh: no triangles");

    Real scale = 1.0;
    for (const auto& v : vertices_) {
      if (!v.allFinite()) throw std::invalid_argument("ScreenMesh: non-finite vertex");
      scale = std::max(scale, v.norm());
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (std::abs(frame_.signed_distance(vertices_[i])) > 1e-12 * scale) {
        throw std::invalid_argument("ScreenMesh: vertex " + std::to_string(i) +
                                    " is not on the supporting plane");
      }
    }

    areas_.resize(triangles_.size());
    Real max_edge = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int idx : triangles_[t]) {
        if (idx < 0 || idx >= nv) throw std::invalid_argument("ScreenMesh: vertex index out of range");
      }
      const Vec3 cr = (vertex(t, 1) - vertex(t, 0)).cross(vertex(t, 2) - vertex(t, 0));
      max_edge = std::max(max_edge, diameter(t));
      const Real signed_area = 0.5 * cr.dot(frame_.normal());
      if (!(signed_area > 0.0)) {
        throw std::invalid_argument("ScreenMesh: triangle " + std::to_string(t) +
                                    " is degenerate or oriented against the frame normal");
      }
      areas_[t] = 0.5 * cr.norm();
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      if (areas_[t] < 1e-12 * max_edge * max_edge) {
        throw std::invalid_argument("ScreenMesh: triangle " + std::to_string(t) + " is degenerate");
      }
    }

    std::map<std::pair<int, int>, int> lookup;
    triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int i = 0; i < 3; ++i) {
        const int a = triangles_[t][static_cast<std::size_t>((i + 1) % 3)];
        const int b = triangles_[t][static_cast<std::size_t>((i + 2) % 3)];
        const auto key = std::minmax(a, b);
        auto [it, inserted] = lookup.try_emplace({key.first, key.second}, static_cast<int>(edges_.size()));
        if (inserted) {
          Edge e;
          e.vertices = {a, b};
          e.triangles[0] = static_cast<int>(t);
          e.local[0] = i;
          edges_.push_back(e);
        } else {
          Edge& e = edges_[static_cast<std::size_t>(it->second)];
          if (e.interior()) {
            throw std::invalid_argument("ScreenMesh: edge shared by more than two triangles");
          }
          if (e.vertices[0] != b || e.vertices[1] != a) {
            throw std::invalid_argument("ScreenMesh: inconsistent triangle orientation");
          }
          e.triangles[1] = static_cast<int>(t);
          e.local[1] = i;
        }
        triangle_edges_[t][static_cast<std::size_t>(i)] = it->second;
      }
    }

    // Edge-connectivity by flood fill over interior edges.
    std::vector<char> seen(triangles_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const auto t = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const Edge& e = edges_[static_cast<std::size_t>(triangle_edges_[t][static_cast<std::size_t>(i)])];
        if (!e.interior()) continue;
        const int other = e.triangles[0] == static_cast<int>(t) ? e.triangles[1] : e.triangles[0];
        if (!seen[static_cast<std::size_t>(other)]) {
          seen[static_cast<std::size_t>(other)] = 1;
          ++reached;
          stack.push_back(other);
        }
      }
    }
    if (reached != triangles_.size()) throw std::invalid_argument("ScreenMesh: mesh is not edge-connected");
  }

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  PlaneFrame frame_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Real> areas_;
};

}  // namespace screenbem::geometry
