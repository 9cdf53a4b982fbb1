#pragma once

#include <cmath>
#include <stdexcept>

#include "screenbem/types.hpp"

namespace screenbem::geometry {

/// Supporting plane {x : <normal, x> = offset} with an orthonormal in-plane
/// basis. The tangents are a deterministic function of the normal, so a
/// frame is fully described by (normal, offset); the mesh file relies on this.
class PlaneFrame {
 public:
  PlaneFrame() : PlaneFrame(Vec3::UnitZ(), 0.0) {}

  PlaneFrame(const Vec3& normal, Real offset) : offset_(offset) {
    const Real len = normal.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw std::invalid_argument("PlaneFrame: normal must be a nonzero finite vector");
    }
    if (!std::isfinite(offset)) {
      throw std::invalid_argument("PlaneFrame: offset must be finite");
    }
    normal_ = normal / len;
    const Vec3 helper = std::abs(normal_.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    t1_ = (helper - helper.dot(normal_) * normal_).normalized();
    t2_ = normal_.cross(t1_);
  }

  static PlaneFrame xy(Real offset = 0.0) { return PlaneFrame(Vec3::UnitZ(), offset); }

  /// Plane through `point` with the given normal.
  static PlaneFrame through(const Vec3& point, const Vec3& normal) {
    const Vec3 n = normal.normalized();
    return PlaneFrame(n, n.dot(point));
  }

  const Vec3& normal() const { return normal_; }
  Real offset() const { return offset_; }
  const Vec3& t1() const { return t1_; }
  const Vec3& t2() const { return t2_; }
  Vec3 origin() const { return offset_ * normal_; }

  Real signed_distance(const Vec3& x) const { return normal_.dot(x) - offset_; }

  Vec3 point(Real s, Real t) const { return origin() + s * t1_ + t * t2_; }
  Vec3 point(const Vec2& st) const { return point(st.x(), st.y()); }

  /// In-plane coordinates of the orthogonal projection of x.
  Vec2 coordinates(const Vec3& x) const {
    const Vec3 r = x - origin();
    return {r.dot(t1_), r.dot(t2_)};
  }

  Vec3 project(const Vec3& x) const { return x - signed_distance(x) * normal_; }
  Vec3 mirror(const Vec3& x) const { return x - 2.0 * signed_distance(x) * normal_; }

  /// Same plane with the opposite orientation.
  PlaneFrame flipped() const { return PlaneFrame(-normal_, -offset_); }

  PlaneFrame translated(const Vec3& shift) const {
    return PlaneFrame(normal_, offset_ + normal_.dot(shift));
  }

 private:
  Vec3 normal_;
  Real offset_ = 0.0;
  Vec3 t1_;
  Vec3 t2_;
};

}  // namespace screenbem::geometry
