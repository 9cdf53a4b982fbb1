// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Lengths are in wavelengths (lambda = 1, eps = mu = 1).

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../helpers.hpp"
#include "screenbem/fields/far_field.hpp"
#include "screenbem/inverse/fourier_data.hpp"
#include "screenbem/inverse/full_support.hpp"
#include "screenbem/inverse/plane_fit.hpp"
#include "screenbem/inverse/support_image.hpp"

using namespace screenbem;
using fields::DirectionGrid;
using fields::GridKind;
using geometry::PlaneFrame;
using testing_support::Solved;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const em::PlaneWaveSpec kWave = testing_support::oblique_wave();

Solved rectangle(Real a, Real b, int nx, int ny, const PlaneFrame& f = PlaneFrame::xy()) {
  return testing_support::solve(geometry::make_rectangle_screen(a, b, nx, ny, f), kWave);
}

Outcome impedance_identity() {
  const Real lim = fields::kImpedanceTolerance;
  Real worst = 0.0;
  const auto grid = DirectionGrid::make(GridKind::full, 16, 32);
  const std::vector<Solved> cases = [] {
    std::vector<Solved> v;
    v.push_back(rectangle(1.0, 1.0, 8, 8));
    v.push_back(testing_support::solve(geometry::make_disk_screen(0.5, 2, PlaneFrame(Vec3(0.3, -0.5, 1.0), 0.4)),
                                       kWave));
    v.push_back(rectangle(1.0, 0.5, 6, 3, PlaneFrame(Vec3(1.0, 0.2, 0.1), -0.7)));
    return v;
  }();
  for (const auto& s : cases) worst = std::max(worst, fields::impedance_residual(fields::far_field(s.current(), grid)));
  return {worst < lim, fmt("max residual %.3e", worst) + fmt(" over 3 screens (limit %.0e)", lim)};
}

Outcome galerkin_symmetry() {
  Real worst = 0.0;
  for (int n : {8, 16}) {
    const auto mesh = geometry::make_rectangle_screen(1.0, 1.0, n, n, PlaneFrame::xy());
    const geometry::EdgeBasisSet basis(mesh);
    const CMatrix A = bem::assemble_system(mesh, basis, em::MediumParams::normalized()).A;
    worst = std::max(worst, (A - A.transpose()).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff());
  }
  return {worst < 1e-12, fmt("max|A-A^T|/max|A| = %.3e on 8x8, 16x16 (limit 1e-12)", worst)};
}

/// Relative tangential total-E residual at triangle centroids lifted by
/// 1e-3 h; `interior` restricts to triangles with no boundary vertex.
Real bc_residual(const Solved& s, bool interior) {
  const auto cur = s.current();
  const auto& mesh = *s.mesh;
  const Vec3 nu = mesh.frame().normal();
  const Real delta = 1e-3 * mesh.mesh_size();
  std::vector<bool> on_rim(mesh.num_vertices(), false);
  for (const auto& e : mesh.edges()) {
    if (!e.interior()) on_rim[static_cast<std::size_t>(e.vertices[0])] = on_rim[static_cast<std::size_t>(e.vertices[1])] = true;
  }
  Real num = 0.0, den = 0.0;
  const CVec3 n = to_complex(nu);
  const auto tangential = [&n](const CVec3& v) -> CVec3 { return v - n * dot(n, v); };
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (interior) {
      bool rim = false;
      for (int idx : mesh.triangles()[t]) rim = rim || on_rim[static_cast<std::size_t>(idx)];
      if (rim) continue;
    }
    const Vec3 x = mesh.centroid(t) + delta * nu;
    num += tangential(fields::total_fields(cur, kWave, x).E).squaredNorm();
    den += tangential(em::plane_wave_fields(kWave, s.medium, x).E).squaredNorm();
  }
  return std::sqrt(num / den);
}

Outcome boundary_condition() {
  std::vector<Real> all, inner;
  for (int n : {8, 16, 32}) {
    const Solved s = rectangle(1.0, 1.0, n, n);
    all.push_back(bc_residual(s, false));
    inner.push_back(bc_residual(s, true));
  }
  const bool monotone = all[1] < all[0] && all[2] < all[1];
  const bool small = all[2] < 0.05;
  std::string d = "residual h=1/8,1/16,1/32: " + fmt("%.4f", all[0]) + fmt(", %.4f", all[1]) + fmt(", %.4f", all[2]) +
                  (monotone ? " (monotone)" : " (NOT monotone)") + fmt("; finest %.4f vs limit 0.05", all[2]) +
                  " | rim-free triangles only: " + fmt("%.4f", inner[0]) + fmt(", %.4f", inner[1]) +
                  fmt(", %.4f", inner[2]);
  return {monotone && small, d};
}

Outcome jump_relation() {
  const Solved s = rectangle(1.0, 1.0, 16, 16);
  const auto cur = s.current();
  const Vec3 nu = s.mesh->frame().normal();
  const Real delta = 1e-3 * s.mesh->mesh_size();
  Real worst = 0.0;
  for (std::size_t t = 0; t < s.mesh->num_triangles(); ++t) {
    const Vec3 c = s.mesh->centroid(t);
    const CVec3 jump = fields::scattered_fields(cur, c + delta * nu).H - fields::scattered_fields(cur, c - delta * nu).H;
    const CVec3 rho = cur.at(t, c);
    worst = std::max(worst, (cross(to_complex(nu), jump) - rho).norm() / rho.norm());
  }
  return {worst < 0.05, fmt("max pointwise relative error %.4f over all centroids, h=1/16 (limit 0.05)", worst)};
}

Outcome near_far() {
  const Solved s = rectangle(1.0, 1.0, 8, 8);
  const auto cur = s.current();
  const Real k = s.medium.k();
  const Real r = 200.0;
  const auto dirs = fields::fibonacci_directions(16);
  const auto ff = fields::far_field(cur, DirectionGrid::custom(dirs));
  Real scale = 0.0, worst = 0.0, pointwise = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) scale = std::max(scale, ff.E[i].norm());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const CVec3 scaled = (4.0 * pi * r * std::exp(-I * (k * r))) * fields::scattered_fields(cur, r * dirs[i]).E;
    worst = std::max(worst, (scaled - ff.E[i]).norm() / scale);
    pointwise = std::max(pointwise, (scaled - ff.E[i]).norm() / ff.E[i].norm());
  }
  return {worst < 0.01, fmt("max mismatch / max|E_inf| = %.4f over 16 directions at |x| = 200 (limit 0.01)", worst) +
                            fmt("; per-direction worst %.4f", pointwise)};
}

Outcome degenerate_polarization() {
  const em::PlaneWaveSpec deg(Vec3(0.3, -0.2, -1.0), Vec3(-0.6, 0.4, 2.0));
  const auto mesh = geometry::make_rectangle_screen(1.0, 1.0, 8, 8, PlaneFrame::xy());
  const geometry::EdgeBasisSet basis(mesh);
  const em::MediumParams m = em::MediumParams::normalized();
  const auto sys = bem::assemble_system(mesh, basis, m);
  const auto rhs = bem::assemble_rhs(mesh, basis, deg, m);
  const auto rho = bem::solve_density(sys, rhs);
  const auto ff = fields::far_field(fields::SurfaceCurrent(basis, rho, m), DirectionGrid::make(GridKind::full, 8, 16));
  const Real rn = rhs.values.norm();
  const Real fm = ff.max_abs();
  return {rn == 0.0 && fm == 0.0, fmt("||rhs|| = %g", rn) + fmt(", max|far field| = %g (both must be exactly 0)", fm)};
}

Outcome full_support() {
  const Solved s = rectangle(1.0, 0.5, 16, 8);
  const auto r = inverse::full_support_check(s.current(), 1e-3);
  return {r.fraction == 1.0, fmt("supported fraction %.4f at tau = 1e-3 (must be 1.0)", r.fraction)};
}

Outcome support_recovery() {
  const Vec2 center(0.3, -0.2);
  const Solved s = testing_support::solve(
      geometry::make_rectangle_screen(1.0, 1.0, 8, 8, PlaneFrame::xy()).translated(Vec3(center.x(), center.y(), 0.0)),
      kWave);
  const auto ff = fields::far_field(s.current(), DirectionGrid::make(GridKind::full, 16, 32));
  const auto img = inverse::reconstruct_support(inverse::extract_fourier_data(ff, PlaneFrame::xy()),
                                                inverse::ImageGridSpec{Vec2::Zero(), 1.5, 0.05});
  const Real h = inverse::hausdorff_distance(img.support_points(), inverse::sample_rectangle(center, 1.0, 1.0, 0.05));
  const auto c = img.support_centroid();
  const Real cerr = c ? (*c - center).norm() : std::numeric_limits<Real>::infinity();
  return {h < 0.5 && cerr < 0.1,
          fmt("Hausdorff %.3f (limit 0.5)", h) + fmt(", centroid error %.4f (limit 0.1)", cerr)};
}

Outcome hyperplane_recovery() {
  std::mt19937_64 rng(20240611);
  const Eigen::Matrix3d R = testing_support::random_rotation(rng);
  const auto base = geometry::make_rectangle_screen(1.0, 1.0, 8, 8, PlaneFrame::xy()).rotated(R);
  const Vec3 nu = base.frame().normal();
  const Real offset = 0.37;
  const auto mesh = base.translated(offset * nu + 0.2 * base.frame().t1());
  const Solved s = testing_support::solve(mesh, kWave);
  const auto ff = fields::far_field(s.current(), DirectionGrid::make(GridKind::full, 16, 32));
  const auto fit = inverse::fit_hyperplane(ff, inverse::PlaneSearchSpec::for_wavelength(1.0));
  const auto [n_true, d_true] = inverse::canonical_plane(mesh.frame().normal(), mesh.frame().offset());
  const Real angle = inverse::normal_angle_deg(fit.estimate.normal, n_true);
  const Real derr = std::abs(fit.estimate.offset - d_true);
  return {angle < 2.0 && derr < 0.05, fmt("normal error %.4f deg (limit 2)", angle) +
                                          fmt(", offset error %.4f (limit 0.05)", derr) +
                                          fmt(", true offset %.3f", d_true)};
}

Outcome distinguishability() {
  const auto grid = DirectionGrid::make(GridKind::full, 16, 32);
  const auto ff = [&](const geometry::ScreenMesh& m) {
    return fields::far_field(testing_support::solve(m, kWave).current(), grid);
  };
  const auto rect = [](int n) { return geometry::make_rectangle_screen(1.0, 0.5, 2 * n, n, PlaneFrame::xy()); };
  // Disk radius chosen so the polygonal disk has exactly the rectangle's area.
  const auto disk = [](int refine) {
    const auto trial = geometry::make_disk_screen(1.0, refine, PlaneFrame::xy());
    return geometry::make_disk_screen(std::sqrt(0.5 / trial.total_area()), refine, PlaneFrame::xy());
  };
  const auto r1 = ff(rect(8)), r2 = ff(rect(16));
  const auto d1 = ff(disk(3)), d2 = ff(disk(4));
  const Real self = std::max(fields::l2_distance(r1, r2), fields::l2_distance(d1, d2));
  const Real diff = fields::l2_distance(r1, d1);
  return {diff > 10.0 * self,
          fmt("||F_rect - F_disk|| = %.4e", diff) + fmt(", self-convergence error %.4e", self) +
              fmt(", ratio %.1f (limit > 10)", diff / self)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"impedance identity", impedance_identity},
      {"Galerkin symmetry", galerkin_symmetry},
      {"boundary condition", boundary_condition},
      {"jump relation", jump_relation},
      {"near/far consistency", near_far},
      {"degenerate polarization", degenerate_polarization},
      {"full-support witness", full_support},
      {"support recovery", support_recovery},
      {"hyperplane recovery", hyperplane_recovery},
      {"distinguishability", distinguishability},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %-24s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
