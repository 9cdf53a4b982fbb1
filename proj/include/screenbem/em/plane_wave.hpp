#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "screenbem/em/medium.hpp"
#include "screenbem/types.hpp"

namespace screenbem::em {

/// Incident plane wave E0 = A mu^{1/2} (p x theta) e^{ik<theta,x>},
/// H0 = A eps^{1/2} (q x theta) e^{ik<theta,x>} with q = theta x p. This
/// orientation of q is the one for which the pair solves
/// curl E = i omega mu H, curl H = -i omega eps E with k = +omega sqrt(eps mu).
class PlaneWaveSpec {
 public:
  PlaneWaveSpec(const Vec3& theta, const Vec3& p, Complex amplitude = 1.0) : amplitude_(amplitude) {
    const Real nt = theta.norm();
    const Real np = p.norm();
    if (!(nt > 0.0) || !(np > 0.0) || !theta.allFinite() || !p.allFinite()) {
      throw std::invalid_argument("PlaneWaveSpec: theta and p must be nonzero finite vectors");
    }
    theta_ = theta / nt;
    p_ = p / np;
  }

  const Vec3& theta() const { return theta_; }
  const Vec3& p() const { return p_; }
  Complex amplitude() const { return amplitude_; }
  Vec3 q() const { return theta_.cross(p_); }

  /// Direction of the electric field, p x theta (zero when p is parallel to theta).
  Vec3 electric_polarization() const { return p_.cross(theta_); }
  Vec3 magnetic_polarization() const { return q().cross(theta_); }

  /// p parallel to theta: the wave carries no field.
  bool degenerate(Real tol = 1e-14) const { return electric_polarization().norm() <= tol; }

  PlaneWaveSpec scaled(Complex factor) const { return {theta_, p_, amplitude_ * factor}; }

 private:
  Vec3 theta_;
  Vec3 p_;
  Complex amplitude_;
};

struct EMField {
  CVec3 E = CVec3::Zero();
  CVec3 H = CVec3::Zero();
};

inline EMField plane_wave_fields(const PlaneWaveSpec& wave, const MediumParams& medium, const Vec3& x) {
  const Complex phase = wave.amplitude() * std::exp(I * (medium.k() * wave.theta().dot(x)));
  EMField f;
  f.E = (std::sqrt(medium.mu()) * phase) * to_complex(wave.electric_polarization());
  f.H = (std::sqrt(medium.epsilon()) * phase) * to_complex(wave.magnetic_polarization());
  return f;
}

}  // namespace screenbem::em
