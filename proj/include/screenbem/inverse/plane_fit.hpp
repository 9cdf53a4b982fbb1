#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "screenbem/fields/far_field.hpp"
#include "screenbem/geometry/plane_frame.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::inverse {

using geometry::PlaneFrame;

/// Search region and model for fit_hyperplane. Lengths are absolute; use
/// for_wavelength() for the defaults scaled to a wavelength.
struct PlaneSearchSpec {
  Real max_offset = 1.0;
  Real angle_step_deg = 10.0;
  Real offset_step = 0.1;
  /// Trial densities live on a grid of this spacing inside a disc of this
  /// radius around the point of the candidate plane nearest the origin.
  Real support_radius = 1.0;
  Real source_spacing = 0.25;
  bool refine = true;
  int max_iterations = 400;
  Real tolerance = 1e-6;

  static PlaneSearchSpec for_wavelength(Real wavelength) {
    PlaneSearchSpec s;
    s.max_offset = wavelength;
    s.offset_step = 0.1 * wavelength;
    s.support_radius = wavelength;
    s.source_spacing = 0.25 * wavelength;
    s.tolerance = 1e-6 * wavelength;
    return s;
  }

  void validate() const {
    if (!(max_offset >= 0.0)) throw std::invalid_argument("PlaneSearchSpec: max_offset must be >= 0");
    if (!(angle_step_deg > 0.0 && angle_step_deg <= 90.0)) {
      throw std::invalid_argument("PlaneSearchSpec: angle step must lie in (0, 90] degrees");
    }
    if (!(offset_step > 0.0)) throw std::invalid_argument("PlaneSearchSpec: offset step must be positive");
    if (!(support_radius > 0.0) || !(source_spacing > 0.0)) {
      throw std::invalid_argument("PlaneSearchSpec: support radius and source spacing must be positive");
    }
    if (max_iterations < 0) throw std::invalid_argument("PlaneSearchSpec: max_iterations must be >= 0");
  }
};

struct PlaneEstimate {
  Vec3 normal = Vec3::UnitZ();
  Real offset = 0.0;
  Real objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Best offset found for one coarse-grid normal.
struct LandscapeEntry {
  Real polar_deg = 0.0;
  Real azimuth_deg = 0.0;
  Vec3 normal = Vec3::UnitZ();
  Real offset = 0.0;
  Real objective = 0.0;
};

struct PlaneFitResult {
  PlaneEstimate estimate;
  std::vector<LandscapeEntry> landscape;
};

/// Representative of {n, -n} with n in the closed upper hemisphere; the
/// offset follows the normal.
inline std::pair<Vec3, Real> canonical_plane(const Vec3& normal, Real offset) {
  const Vec3 n = normal.normalized();
  const bool flip = n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0)));
  return flip ? std::pair{Vec3(-n), -offset} : std::pair{n, offset};
}

/// Relative least-squares residual of fitting the far field by the field of
/// a tangential density on a candidate plane.
///
/// The data are v = H_inf / (ik) = xhat x F, weighted by sqrt of the
/// direction weights and expressed in a basis of the tangent plane at xhat. The density is a set of tangential point sources; the
/// offset enters only as the phase e^{-ik d <xhat, n>} on each row, so one
/// QR per normal serves every offset.
class PlaneObjective {
 public:
  PlaneObjective(const fields::FarFieldData& ff, const PlaneSearchSpec& spec) : spec_(spec), k_(ff.medium.k()) {
    spec.validate();
    if (ff.size() == 0) throw std::invalid_argument("fit_hyperplane: far field has no directions");
    if (ff.max_abs() < 1e-12) throw DegenerateData("fit_hyperplane: far field vanishes");
    const auto m = static_cast<Eigen::Index>(ff.size());
    data_.resize(2 * m);
    dirs_ = ff.grid.directions;
    sqrt_w_.resize(ff.size());
    for (std::size_t i = 0; i < ff.size(); ++i) {
      const PlaneFrame sphere_tangent(dirs_[i], 0.0);
      tangent_basis_.push_back({sphere_tangent.t1(), sphere_tangent.t2()});
      sqrt_w_[i] = std::sqrt(ff.grid.weights[i]);
      const CVec3 v = sqrt_w_[i] * ff.H[i] / (I * k_);
      const auto row = 2 * static_cast<Eigen::Index>(i);
      data_[row] = dot(to_complex(tangent_basis_[i][0]), v);
      data_[row + 1] = dot(to_complex(tangent_basis_[i][1]), v);
    }
  }

  struct Model {
    Vec3 normal;
    Eigen::VectorXd cosines;
    CMatrix Q;
  };

  Model prepare(const Vec3& normal) const {
    const auto [n, unused] = canonical_plane(normal, 0.0);
    const PlaneFrame frame(n, 0.0);
    std::vector<Vec3> sources;
    const int half = static_cast<int>(std::floor(spec_.support_radius / spec_.source_spacing));
    for (int j = -half; j <= half; ++j) {
      for (int i = -half; i <= half; ++i) {
        const Vec2 s = spec_.source_spacing * Vec2(i, j);
        if (s.norm() <= spec_.support_radius * (1.0 + 1e-12)) sources.push_back(frame.point(s));
      }
    }
    const auto rows = static_cast<Eigen::Index>(2 * dirs_.size());
    const auto cols = static_cast<Eigen::Index>(2 * sources.size());
    CMatrix M(rows, cols);
    Model model;
    model.normal = n;
    model.cosines.resize(static_cast<Eigen::Index>(dirs_.size()));
    const std::array<Vec3, 2> tangents{frame.t1(), frame.t2()};
    for (std::size_t i = 0; i < dirs_.size(); ++i) {
      const Vec3& xhat = dirs_[i];
      model.cosines[static_cast<Eigen::Index>(i)] = xhat.dot(n);
      // Components of xhat x t_a along the tangent basis at xhat.
      Eigen::Matrix2d proj;
      for (std::size_t a = 0; a < 2; ++a) {
        const Vec3 c = xhat.cross(tangents[a]);
        proj(0, static_cast<Eigen::Index>(a)) = tangent_basis_[i][0].dot(c);
        proj(1, static_cast<Eigen::Index>(a)) = tangent_basis_[i][1].dot(c);
      }
      const auto row = 2 * static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < sources.size(); ++j) {
        const Complex ph = sqrt_w_[i] * std::exp(-I * (k_ * xhat.dot(sources[j])));
        M.block<2, 2>(row, static_cast<Eigen::Index>(2 * j)) = ph * proj.cast<Complex>();
      }
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(M);
    qr.setThreshold(1e-10);
    const Eigen::Index r = qr.rank();
    model.Q = qr.householderQ() * CMatrix::Identity(rows, r);
    return model;
  }

  Real residual(const Model& model, Real offset) const {
    CVector u = data_;
    for (Eigen::Index i = 0; i < model.cosines.size(); ++i) {
      u.segment<2>(2 * i) *= std::exp(I * (k_ * offset * model.cosines[i]));
    }
    const Real total = u.norm();
    const CVector proj = model.Q.adjoint() * u;
    u.noalias() -= model.Q * proj;
    return u.norm() / total;
  }

  Real operator()(const Vec3& normal, Real offset) const {
    const auto [n, d] = canonical_plane(normal, offset);
    return residual(prepare(n), d);
  }

  const PlaneSearchSpec& spec() const { return spec_; }

 private:
  PlaneSearchSpec spec_;
  Real k_;
  std::vector<Vec3> dirs_;
  std::vector<Real> sqrt_w_;
  std::vector<std::array<Vec3, 2>> tangent_basis_;
  CVector data_;
};

namespace detail {

struct RefineContext {
  const PlaneObjective* objective;
  Vec3 n0, u1, u2;
  int evaluations = 0;
};

inline Vec3 refine_normal(const RefineContext& ctx, const gsl_vector* x) {
  return (ctx.n0 + gsl_vector_get(x, 0) * ctx.u1 + gsl_vector_get(x, 1) * ctx.u2).normalized();
}

inline double refine_eval(const gsl_vector* x, void* params) {
  auto* ctx = static_cast<RefineContext*>(params);
  ++ctx->evaluations;
  return (*ctx->objective)(refine_normal(*ctx, x), gsl_vector_get(x, 2));
}

}  // namespace detail

/// Coarse search over normals (upper hemisphere, angle_step_deg in polar
/// angle and azimuth) and offsets in [-D, D], then Nelder-Mead refinement
/// from the best grid point.
inline PlaneFitResult fit_hyperplane(const fields::FarFieldData& ff, const PlaneSearchSpec& spec) {
  const PlaneObjective objective(ff, spec);

  std::vector<std::pair<Real, Real>> angles;
  const int n_polar = static_cast<int>(std::floor(90.0 / spec.angle_step_deg + 1e-9));
  const int n_az = std::max(1, static_cast<int>(std::round(360.0 / spec.angle_step_deg)));
  angles.emplace_back(0.0, 0.0);
  for (int i = 1; i <= n_polar; ++i) {
    const Real polar = i * spec.angle_step_deg;
    for (int j = 0; j < n_az; ++j) {
      const Real az = j * 360.0 / n_az;
      if (std::abs(polar - 90.0) < 1e-9 && az >= 180.0 - 1e-9) continue;
      angles.emplace_back(polar, az);
    }
  }
  const int n_off = static_cast<int>(std::floor(2.0 * spec.max_offset / spec.offset_step + 1e-9));
  std::vector<Real> offsets;
  for (int m = 0; m <= n_off; ++m) offsets.push_back(-spec.max_offset + m * spec.offset_step);

  PlaneFitResult result;
  result.landscape.resize(angles.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(angles.size()); ++a) {
    const auto idx = static_cast<std::size_t>(a);
    const Real th = angles[idx].first * pi / 180.0;
    const Real ph = angles[idx].second * pi / 180.0;
    const Vec3 n(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    const auto model = objective.prepare(n);
    LandscapeEntry e{angles[idx].first, angles[idx].second, model.normal, 0.0, std::numeric_limits<Real>::infinity()};
    for (Real d : offsets) {
      const Real r = objective.residual(model, d);
      if (r < e.objective) {
        e.objective = r;
        e.offset = d;
      }
    }
    result.landscape[idx] = e;
  }

  const auto best = std::min_element(result.landscape.begin(), result.landscape.end(),
                                     [](const LandscapeEntry& a, const LandscapeEntry& b) {
                                       return a.objective < b.objective;
                                     });
  PlaneEstimate& est = result.estimate;
  est.normal = best->normal;
  est.offset = best->offset;
  est.objective = best->objective;
  est.evaluations = static_cast<int>(angles.size() * offsets.size());

  if (spec.refine && spec.max_iterations > 0) {
    const PlaneFrame frame(best->normal, 0.0);
    detail::RefineContext ctx{&objective, best->normal, frame.t1(), frame.t2()};
    gsl_multimin_function fn{&detail::refine_eval, 3, &ctx};
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, 0.0);
    gsl_vector_set(x, 1, 0.0);
    gsl_vector_set(x, 2, best->offset);
    const Real angle_step = 0.5 * spec.angle_step_deg * pi / 180.0;
    gsl_vector_set(step, 0, angle_step);
    gsl_vector_set(step, 1, angle_step);
    gsl_vector_set(step, 2, 0.5 * spec.offset_step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    int it = 0;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && it < spec.max_iterations) {
      ++it;
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), spec.tolerance);
    }
    if (s->fval < est.objective) {
      const auto [n, d] = canonical_plane(detail::refine_normal(ctx, s->x), gsl_vector_get(s->x, 2));
      est.normal = n;
      est.offset = d;
      est.objective = s->fval;
    }
    est.iterations = it;
    est.evaluations += ctx.evaluations;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
  }
  return result;
}

/// Angle between two planes' normals in degrees, ignoring orientation.
inline Real normal_angle_deg(const Vec3& a, const Vec3& b) {
  const Real c = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return std::acos(c) * 180.0 / pi;
}

// Text format of PlaneEstimate:
//   plane_estimate 1
//   normal <nx> <ny> <nz>
//   offset <d>
//   objective <f>
//   iterations <n>
//   evaluations <n>
// and of the coarse landscape:
//   plane_landscape 1
//   columns polar_deg azimuth_deg normal_x normal_y normal_z offset objective
//   l <7 numbers>

inline void write_plane_estimate(std::ostream& out, const PlaneEstimate& e) {
  using io::format_real;
  out << "plane_estimate 1\n";
  out << "normal " << format_real(e.normal.x()) << ' ' << format_real(e.normal.y()) << ' '
      << format_real(e.normal.z()) << '\n';
  out << "offset " << format_real(e.offset) << '\n';
  out << "objective " << format_real(e.objective) << '\n';
  out << "iterations " << e.iterations << '\n';
  out << "evaluations " << e.evaluations << '\n';
}

inline PlaneEstimate read_plane_estimate(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  PlaneEstimate e;
  std::optional<Vec3> normal;
  std::optional<Real> offset, objective;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    try {
      if (!header) {
        if (tok.size() != 2 || tok[0] != "plane_estimate" || tok[1] != "1") {
          throw std::runtime_error("expected 'plane_estimate 1'");
        }
        header = true;
      } else if (tok[0] == "normal" && tok.size() == 4) {
        normal = Vec3(io::parse_real(tok[1]), io::parse_real(tok[2]), io::parse_real(tok[3]));
      } else if (tok[0] == "offset" && tok.size() == 2) {
        offset = io::parse_real(tok[1]);
      } else if (tok[0] == "objective" && tok.size() == 2) {
        objective = io::parse_real(tok[1]);
      } else if (tok[0] == "iterations" && tok.size() == 2) {
        e.iterations = static_cast<int>(io::parse_int(tok[1]));
      } else if (tok[0] == "evaluations" && tok.size() == 2) {
        e.evaluations = static_cast<int>(io::parse_int(tok[1]));
      } else {
        throw std::runtime_error("unrecognized record '" + tok[0] + "'");
      }
    } catch (const std::exception& ex) {
      throw io::ParseError(lineno, ex.what());
    }
  }
  if (!header) throw std::runtime_error("read_plane_estimate: empty input");
  if (!normal || !offset || !objective) throw std::runtime_error("read_plane_estimate: incomplete record");
  e.normal = *normal;
  e.offset = *offset;
  e.objective = *objective;
  return e;
}

inline void write_plane_landscape(std::ostream& out, const std::vector<LandscapeEntry>& entries) {
  using io::format_real;
  out << "plane_landscape 1\n";
  out << "columns polar_deg azimuth_deg normal_x normal_y normal_z offset objective\n";
  for (const auto& e : entries) {
    out << "l " << format_real(e.polar_deg) << ' ' << format_real(e.azimuth_deg) << ' ' << format_real(e.normal.x())
        << ' ' << format_real(e.normal.y()) << ' ' << format_real(e.normal.z()) << ' ' << format_real(e.offset) << ' '
        << format_real(e.objective) << '\n';
  }
}

inline void save_plane_estimate(const std::string& path, const PlaneEstimate& e) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_plane_estimate(out, e);
}

inline PlaneEstimate load_plane_estimate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_plane_estimate(in);
}

inline void save_plane_landscape(const std::string& path, const std::vector<LandscapeEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_plane_landscape(out, entries);
}

}  // namespace screenbem::inverse
