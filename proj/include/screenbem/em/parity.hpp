#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "screenbem/geometry/plane_frame.hpp"
#include "screenbem/types.hpp"

namespace screenbem::em {

/// Split of a sampled field into its parity +1 part (tangential components
/// even, normal component odd under reflection in the plane) and its
/// parity -1 part (tangential odd, normal even).
struct ParityParts {
  std::vector<CVec3> even;  // parity +1
  std::vector<CVec3> odd;   // parity -1
};

/// Index of the mirror image of every sample point; throws if the sample set
/// is not closed under reflection in the plane.
inline std::vector<std::size_t> mirror_pairing(const std::vector<Vec3>& points, const geometry::PlaneFrame& frame,
                                               Real rel_tol = 1e-12) {
  Real scale = 1.0;
  for (const auto& x : points) scale = std::max(scale, x.norm());
  const Real tol = rel_tol * scale;
  std::vector<std::size_t> partner(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 m = frame.mirror(points[i]);
    bool found = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if ((points[j] - m).norm() <= tol) {
        partner[i] = j;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("parity_decompose: sample set is not mirror-symmetric");
  }
  return partner;
}

inline ParityParts parity_decompose(const std::vector<Vec3>& points, const std::vector<CVec3>& values,
                                    const geometry::PlaneFrame& frame) {
  if (points.size() != values.size()) {
    throw std::invalid_argument("parity_decompose: points and values differ in length");
  }
  const auto partner = mirror_pairing(points, frame);
  const CVec3 n = to_complex(frame.normal());
  const auto reflect = [&n](const CVec3& v) -> CVec3 { return v - 2.0 * n.dot(v) * n; };
  ParityParts parts;
  parts.even.resize(points.size());
  parts.odd.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CVec3 mirrored = reflect(values[partner[i]]);
    parts.even[i] = 0.5 * (values[i] + mirrored);
    parts.odd[i] = 0.5 * (values[i] - mirrored);
  }
  return parts;
}

}  // namespace screenbem::em
