#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "screenbem/geometry/screen_mesh.hpp"

namespace screenbem::geometry {

/// One div-conforming function per interior edge. On its "plus" triangle it
/// is (l / 2A+)(y - p+) and on its "minus" triangle (l / 2A-)(p- - y), where
/// p+- is the vertex opposite the edge. Unit normal flux across the edge,
/// zero flux across every other edge, so boundary edges carry no DOFs.
struct EdgeFunction {
  int edge = -1;
  std::array<int, 2> triangles{-1, -1};  // plus, minus
  std::array<int, 2> local{-1, -1};      // local edge (= opposite vertex) index
  Real length = 0.0;
  std::array<Real, 2> areas{0.0, 0.0};
};

/// Support of a basis function restricted to one triangle.
struct LocalBasis {
  int basis = -1;  // index into EdgeBasisSet
  int local = -1;  // local edge / opposite vertex index within the triangle
  Real sign = 0.0; // +1 on the plus triangle, -1 on the minus triangle
};

/// Complex tangential field on one triangle in the form g * y - h, which is
/// what a linear combination of edge functions reduces to.
struct TriangleDensity {
  Complex g{0.0, 0.0};
  CVec3 h = CVec3::Zero();

  CVec3 at(const Vec3& y) const { return g * to_complex(y) - h; }
  Complex divergence() const { return 2.0 * g; }
};

/// Holds a reference to its mesh; the mesh must outlive the basis.
class EdgeBasisSet {
 public:
  explicit EdgeBasisSet(const ScreenMesh& mesh) : mesh_(&mesh), per_triangle_(mesh.num_triangles()) {
    const auto& edges = mesh.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edges[e].interior()) continue;
      EdgeFunction f;
      f.edge = static_cast<int>(e);
      f.triangles = edges[e].triangles;
      f.local = edges[e].local;
      f.length = (mesh.vertices()[static_cast<std::size_t>(edges[e].vertices[0])] -
                  mesh.vertices()[static_cast<std::size_t>(edges[e].vertices[1])])
                     .norm();
      f.areas = {mesh.area(static_cast<std::size_t>(f.triangles[0])),
                 mesh.area(static_cast<std::size_t>(f.triangles[1]))};
      const int n = static_cast<int>(functions_.size());
      per_triangle_[static_cast<std::size_t>(f.triangles[0])].push_back({n, f.local[0], 1.0});
      per_triangle_[static_cast<std::size_t>(f.triangles[1])].push_back({n, f.local[1], -1.0});
      functions_.push_back(f);
    }
  }

  const ScreenMesh& mesh() const { return *mesh_; }
  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }
  const EdgeFunction& operator[](std::size_t n) const { return functions_[n]; }
  const std::vector<EdgeFunction>& functions() const { return functions_; }

  /// Basis functions supported on triangle t.
  const std::vector<LocalBasis>& on_triangle(std::size_t t) const { return per_triangle_[t]; }

  /// Value of basis function n at point y of triangle t (zero off its support).
  Vec3 evaluate(std::size_t n, std::size_t t, const Vec3& y) const {
    const EdgeFunction& f = functions_[n];
    for (int side = 0; side < 2; ++side) {
      if (f.triangles[static_cast<std::size_t>(side)] != static_cast<int>(t)) continue;
      const Vec3& p = mesh_->vertex(t, f.local[static_cast<std::size_t>(side)]);
      const Real s = side == 0 ? 1.0 : -1.0;
      return s * f.length / (2.0 * f.areas[static_cast<std::size_t>(side)]) * (y - p);
    }
    return Vec3::Zero();
  }

  /// Surface divergence of basis function n on triangle t: +-l/A or 0.
  Real divergence(std::size_t n, std::size_t t) const {
    const EdgeFunction& f = functions_[n];
    if (f.triangles[0] == static_cast<int>(t)) return f.length / f.areas[0];
    if (f.triangles[1] == static_cast<int>(t)) return -f.length / f.areas[1];
    return 0.0;
  }

  /// Restriction of sum_n c_n b_n to triangle t.
  TriangleDensity density_on(std::size_t t, const CVector& coefficients) const {
    TriangleDensity d;
    const Real area = mesh_->area(t);
    for (const LocalBasis& lb : per_triangle_[t]) {
      const EdgeFunction& f = functions_[static_cast<std::size_t>(lb.basis)];
      const Complex c = lb.sign * coefficients[lb.basis] * (f.length / (2.0 * area));
      d.g += c;
      d.h += c * to_complex(mesh_->vertex(t, lb.local));
    }
    return d;
  }

  std::vector<TriangleDensity> densities(const CVector& coefficients) const {
    if (static_cast<std::size_t>(coefficients.size()) != size()) {
      throw std::invalid_argument("EdgeBasisSet: coefficient vector has wrong length");
    }
    std::vector<TriangleDensity> out(mesh_->num_triangles());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = density_on(t, coefficients);
    return out;
  }

 private:
  const ScreenMesh* mesh_;
  std::vector<EdgeFunction> functions_;
  std::vector<std::vector<LocalBasis>> per_triangle_;
};

}  // namespace screenbem::geometry
