#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "screenbem/fields/far_field.hpp"
#include "screenbem/geometry/plane_frame.hpp"

namespace screenbem::inverse {

using fields::FarFieldData;
using geometry::PlaneFrame;

/// Samples of the in-plane Fourier transform
///   a(xi') = int e^{-i xi' . s} (rho . t1, rho . t2)(s) ds,
/// with s the in-plane coordinates of the frame. `weights` approximate d xi'
/// so that sum w a e^{i xi' . s} / (4 pi^2) is the band-limited inverse.
struct FourierSamples {
  PlaneFrame frame = PlaneFrame::xy();
  Real k = 0.0;
  std::vector<Vec2> xi;
  std::vector<CVec2> values;
  std::vector<Real> weights;
  std::size_t skipped = 0;

  std::size_t size() const { return xi.size(); }
  bool empty() const { return xi.empty(); }
};

inline constexpr Real kGrazingCutoff = 0.1;

/// Tangential w with v = xhat x w, for |<xhat, nu>| > 0.
inline CVec3 invert_cross(const Vec3& xhat, const Vec3& nu, const CVec3& v) {
  const CVec3 xc = to_complex(xhat);
  const CVec3 xv = cross(xc, v);
  const Complex along = dot(to_complex(nu), xv) / xhat.dot(nu);
  return xc * along - xv;
}

/// Fourier data of the jump density from H_inf = ik xhat x F, F = int e^{-ik<xhat,y>} rho.
/// Directions with |<xhat, nu>| <= cutoff are skipped and counted.
inline FourierSamples extract_fourier_data(const FarFieldData& ff, const PlaneFrame& frame,
                                           Real cutoff = kGrazingCutoff) {
  FourierSamples fs;
  fs.frame = frame;
  const Real k = ff.medium.k();
  fs.k = k;
  const Vec3& nu = frame.normal();
  bool upper = false, lower = false;
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const Vec3& xhat = ff.grid.directions[i];
    const Real c = xhat.dot(nu);
    if (std::abs(c) <= cutoff) {
      ++fs.skipped;
      continue;
    }
    (c > 0 ? upper : lower) = true;
    const CVec3 w = invert_cross(xhat, nu, ff.H[i] / (I * k));
    const Complex phase = std::exp(I * (k * frame.offset() * c));
    fs.xi.emplace_back(k * xhat.dot(frame.t1()), k * xhat.dot(frame.t2()));
    fs.values.emplace_back(phase * dot(w, to_complex(frame.t1())), phase * dot(w, to_complex(frame.t2())));
    fs.weights.push_back(k * k * std::abs(c) * ff.grid.weights[i]);
  }
  // Both half-spaces project onto the same disc |xi'| < k.
  if (upper && lower) {
    for (auto& w : fs.weights) w *= 0.5;
  }
  return fs;
}

}  // namespace screenbem::inverse
