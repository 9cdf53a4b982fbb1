#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "screenbem/fields/near_field.hpp"

namespace screenbem::inverse {

struct FullSupportReport {
  Real fraction = 0.0;
  std::vector<bool> supported;
  std::vector<Real> local_norm;
};

inline constexpr Real kDefaultFullSupportThreshold = 1e-3;

/// Per-triangle RMS density sqrt(int_T |rho|^2 / |T|) against tau times its
/// maximum over the mesh.
inline FullSupportReport full_support_check(const fields::SurfaceCurrent& current,
                                            Real tau = kDefaultFullSupportThreshold) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("full_support_check: threshold must lie in (0, 1)");
  const auto& mesh = current.mesh();
  const auto quad = geometry::quadrature_rule(2);
  FullSupportReport r;
  r.local_norm.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    Real acc = 0.0;
    for (const auto& p : geometry::map_rule(quad, mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2))) {
      acc += p.w * current.at(t, p.x).squaredNorm();
    }
    r.local_norm[t] = std::sqrt(acc / mesh.area(t));
  }
  const Real peak = r.local_norm.empty() ? 0.0 : *std::max_element(r.local_norm.begin(), r.local_norm.end());
  r.supported.assign(mesh.num_triangles(), false);
  if (!(peak > 0.0)) return r;
  std::size_t count = 0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    r.supported[t] = r.local_norm[t] >= tau * peak;
    count += r.supported[t] ? 1 : 0;
  }
  r.fraction = static_cast<Real>(count) / static_cast<Real>(mesh.num_triangles());
  return r;
}

}  // namespace screenbem::inverse
