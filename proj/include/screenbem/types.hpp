#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace screenbem {

using Real = double;
using Complex = std::complex<double>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CVec2 = Eigen::Vector2cd;
using CVec3 = Eigen::Vector3cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Real pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

/// Evaluation at a point where a kernel or layer potential is singular.
class SingularEvaluation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense solve rejected because the system matrix is numerically singular.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Input data violates the non-vanishing hypothesis of the inverse problem.
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CVec3 to_complex(const Vec3& v) { return v.cast<Complex>(); }

/// Bilinear cross product. Eigen's cross() conjugates complex operands.
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

/// Bilinear dot product (no conjugation).
inline Complex dot(const CVec3& a, const CVec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

}  // namespace screenbem
