#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "screenbem/em/kernel.hpp"
#include "screenbem/em/medium.hpp"
#include "screenbem/em/parity.hpp"
#include "screenbem/em/plane_wave.hpp"

using namespace screenbem;
using namespace screenbem::em;

namespace {

template <class F>
CVec3 curl(F&& field, const Vec3& x, Real h) {
  CVec3 d[3];
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    d[j] = (field(x + e) - field(x - e)) / (2.0 * h);
  }
  return {d[1].z() - d[2].y(), d[2].x() - d[0].z(), d[0].y() - d[1].x()};
}

}  // namespace

TEST(Medium, WavenumberIsDerived) {
  const MediumParams m(3.0, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(m.k(), 3.0);
  EXPECT_DOUBLE_EQ(m.impedance(), 0.5);
  EXPECT_NEAR(MediumParams::normalized(0.5).k(), 4.0 * pi, 1e-14);
  EXPECT_NEAR(MediumParams::normalized(0.5).wavelength(), 0.5, 1e-15);
  EXPECT_THROW(MediumParams(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(MediumParams(1.0, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(MediumParams(1.0, 1.0, std::nan("")), std::invalid_argument);
}

TEST(PlaneWave, PolarizationsAreTransverse) {
  const PlaneWaveSpec w(Vec3(1, 2, -2), Vec3(0, 1, 0), Complex(0.5, 1.0));
  EXPECT_NEAR(w.theta().norm(), 1.0, 1e-15);
  EXPECT_NEAR(w.electric_polarization().dot(w.theta()), 0.0, 1e-15);
  EXPECT_NEAR(w.magnetic_polarization().dot(w.theta()), 0.0, 1e-15);
  EXPECT_NEAR(w.electric_polarization().dot(w.magnetic_polarization()), 0.0, 1e-15);
  EXPECT_FALSE(w.degenerate());
  EXPECT_THROW(PlaneWaveSpec(Vec3::Zero(), Vec3::UnitX()), std::invalid_argument);
}

TEST(PlaneWave, SolvesMaxwell) {
  const MediumParams m(5.0, 1.7, 0.6);
  const PlaneWaveSpec w(Vec3(0.3, -0.4, 0.8), Vec3(1, 0.2, 0.1), Complex(1.0, -0.3));
  const Vec3 x(0.2, 0.1, -0.3);
  const Real h = 1e-5;
  const auto E = [&](const Vec3& y) { return plane_wave_fields(w, m, y).E; };
  const auto H = [&](const Vec3& y) { return plane_wave_fields(w, m, y).H; };
  const EMField f = plane_wave_fields(w, m, x);
  const Real scale = f.E.norm() * m.k();
  EXPECT_LT((curl(E, x, h) - I * m.omega() * m.mu() * f.H).norm() / scale, 1e-8);
  EXPECT_LT((curl(H, x, h) + I * m.omega() * m.epsilon() * f.E).norm() / scale, 1e-8);
}

TEST(PlaneWave, DegenerateCarriesNoField) {
  const PlaneWaveSpec w(Vec3(0, 0, 1), Vec3(0, 0, -3));
  EXPECT_TRUE(w.degenerate());
  const EMField f = plane_wave_fields(w, MediumParams::normalized(), Vec3(0.1, 0.2, 0.3));
  EXPECT_EQ(f.E.norm(), 0.0);
  EXPECT_EQ(f.H.norm(), 0.0);
}

TEST(Kernel, SatisfiesHelmholtzAwayFromSource) {
  const Real k = 2.0 * pi;
  const Vec3 y(0.1, -0.2, 0.05);
  const Vec3 x(0.6, 0.3, -0.4);
  const Real h = 1e-3;
  Complex lap = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    lap += (helmholtz_phi(x + e, y, k) - 2.0 * helmholtz_phi(x, y, k) + helmholtz_phi(x - e, y, k)) / (h * h);
  }
  EXPECT_LT(std::abs(lap + k * k * helmholtz_phi(x, y, k)) / std::abs(k * k * helmholtz_phi(x, y, k)), 1e-5);
}

TEST(Kernel, GradientMatchesFiniteDifferences) {
  const Real k = 3.0;
  const Vec3 y(0.0, 0.1, 0.2);
  const Vec3 x(0.4, -0.3, 0.5);
  const Real h = 1e-6;
  const CVec3 g = grad_phi(x, y, k);
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    const Complex fd = (helmholtz_phi(x + e, y, k) - helmholtz_phi(x - e, y, k)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - g[j]), 1e-8);
  }
}

TEST(Kernel, SymmetricAndSingularAtCoincidence) {
  const Vec3 x(0.3, 0.2, 0.1), y(-0.1, 0.4, 0.0);
  EXPECT_EQ(helmholtz_phi(x, y, 2.0), helmholtz_phi(y, x, 2.0));
  EXPECT_THROW(helmholtz_phi(x, x, 2.0), SingularEvaluation);
  EXPECT_THROW(grad_phi(x, x, 2.0), SingularEvaluation);
}

TEST(BilinearAlgebra, NoConjugation) {
  const CVec3 a(Complex(0, 1), 0, 0), b(0, Complex(0, 1), 0);
  EXPECT_EQ(cross(a, b), CVec3(0, 0, -1));
  EXPECT_EQ(dot(a, a), Complex(-1, 0));
}

TEST(Parity, PartsSumAndHaveDefiniteParity) {
  const geometry::PlaneFrame frame(Vec3(0.2, -0.1, 1.0), 0.3);
  std::mt19937_64 rng(5);
  std::normal_distribution<Real> nd;
  std::vector<Vec3> pts;
  for (int i = 0; i < 6; ++i) {
    const Vec3 p = frame.point(nd(rng), nd(rng)) + (0.5 + std::abs(nd(rng))) * frame.normal();
    pts.push_back(p);
    pts.push_back(frame.mirror(p));
  }
  std::vector<CVec3> vals;
  for (std::size_t i = 0; i < pts.size(); ++i) vals.emplace_back(Complex(nd(rng), nd(rng)), nd(rng), nd(rng));
  const ParityParts parts = parity_decompose(pts, vals, frame);
  const CVec3 n = to_complex(frame.normal());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_LT((parts.even[i] + parts.odd[i] - vals[i]).norm(), 1e-14);
    const std::size_t j = i ^ 1u;
    const auto tangential = [&](const CVec3& v) -> CVec3 { return v - n.dot(v) * n; };
    EXPECT_LT((tangential(parts.even[i]) - tangential(parts.even[j])).norm(), 1e-14);
    EXPECT_LT(std::abs(n.dot(parts.even[i]) + n.dot(parts.even[j])), 1e-14);
    EXPECT_LT((tangential(parts.odd[i]) + tangential(parts.odd[j])).norm(), 1e-14);
    EXPECT_LT(std::abs(n.dot(parts.odd[i]) - n.dot(parts.odd[j])), 1e-14);
  }
}

TEST(Parity, RejectsAsymmetricSamples) {
  const std::vector<Vec3> pts{Vec3(0, 0, 1), Vec3(0, 0, -2)};
  const std::vector<CVec3> vals(2, CVec3::Zero());
  EXPECT_THROW(parity_decompose(pts, vals, geometry::PlaneFrame::xy()), std::invalid_argument);
}
