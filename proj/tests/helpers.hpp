#pragma once

#include <memory>
#include <random>

#include "screenbem/bem/assembly.hpp"
#include "screenbem/bem/solve.hpp"
#include "screenbem/fields/near_field.hpp"
#include "screenbem/geometry/generators.hpp"

namespace testing_support {

using namespace screenbem;

/// Mesh, basis and solved density kept alive together.
struct Solved {
  std::unique_ptr<geometry::ScreenMesh> mesh;
  std::unique_ptr<geometry::EdgeBasisSet> basis;
  em::MediumParams medium = em::MediumParams::normalized();
  bem::SystemMatrix sys{CMatrix(), em::MediumParams::normalized()};
  bem::RhsVector rhs;
  bem::DensityVector rho;

  fields::SurfaceCurrent current() const { return {*basis, rho, medium}; }
};

inline Solved solve(geometry::ScreenMesh mesh, const em::PlaneWaveSpec& wave,
                    em::MediumParams medium = em::MediumParams::normalized()) {
  Solved s;
  s.medium = medium;
  s.mesh = std::make_unique<geometry::ScreenMesh>(std::move(mesh));
  s.basis = std::make_unique<geometry::EdgeBasisSet>(*s.mesh);
  s.sys = bem::assemble_system(*s.mesh, *s.basis, medium);
  s.rhs = bem::assemble_rhs(*s.mesh, *s.basis, wave, medium);
  s.rho = bem::solve_density(s.sys, s.rhs);
  return s;
}

inline em::PlaneWaveSpec oblique_wave() { return {Vec3(0.3, -0.2, -1.0), Vec3(1.0, 0.4, 0.1)}; }

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<Real> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<Real> n;
  return Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
}

}  // namespace testing_support
