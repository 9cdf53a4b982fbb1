#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "screenbem/fields/near_field.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::fields {

enum class GridKind { full, upper, custom };

inline std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::full: return "full";
    case GridKind::upper: return "upper";
    case GridKind::custom: return "custom";
  }
  return "custom";
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "full") return GridKind::full;
  if (s == "upper") return GridKind::upper;
  if (s == "custom") return GridKind::custom;
  throw std::invalid_argument("unknown direction grid kind '" + s + "'");
}

/// Directions on the unit sphere with solid-angle quadrature weights.
///
/// `full` and `upper` grids are Gauss-Legendre in cos(polar angle) times a
/// uniform azimuth; `upper` covers z >= 0 only.
struct DirectionGrid {
  GridKind kind = GridKind::custom;
  int n_polar = 0;
  int n_azimuth = 0;
  std::vector<Vec3> directions;
  std::vector<Real> weights;

  std::size_t size() const { return directions.size(); }

  static DirectionGrid make(GridKind kind, int n_polar, int n_azimuth) {
    if (kind == GridKind::custom) throw std::invalid_argument("DirectionGrid::make: custom grids need directions");
    if (n_polar < 1 || n_azimuth < 1) throw std::invalid_argument("DirectionGrid::make: counts must be >= 1");
    DirectionGrid g;
    g.kind = kind;
    g.n_polar = n_polar;
    g.n_azimuth = n_azimuth;
    const auto gl = geometry::gauss_legendre(n_polar);
    const Real lo = kind == GridKind::full ? -1.0 : 0.0;
    const Real span = 1.0 - lo;
    for (int i = 0; i < n_polar; ++i) {
      const Real c = lo + span * gl.nodes[static_cast<std::size_t>(i)];
      const Real s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < n_azimuth; ++j) {
        const Real phi = 2.0 * pi * (j + 0.5) / n_azimuth;
        g.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
        g.weights.push_back(span * gl.weights[static_cast<std::size_t>(i)] * 2.0 * pi / n_azimuth);
      }
    }
    return g;
  }

  /// Arbitrary directions (normalized) with equal weights 4 pi / N.
  static DirectionGrid custom(std::vector<Vec3> dirs) {
    DirectionGrid g;
    g.kind = GridKind::custom;
    for (auto& d : dirs) {
      const Real n = d.norm();
      if (!(n > 0.0)) throw std::invalid_argument("DirectionGrid::custom: zero direction");
      d /= n;
    }
    g.directions = std::move(dirs);
    g.weights.assign(g.directions.size(), g.directions.empty() ? 0.0 : 4.0 * pi / g.directions.size());
    return g;
  }
};

/// Near-uniform deterministic directions (Fibonacci lattice).
inline std::vector<Vec3> fibonacci_directions(std::size_t n) {
  std::vector<Vec3> out;
  out.reserve(n);
  const Real golden = pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const Real z = 1.0 - (2.0 * i + 1.0) / static_cast<Real>(n);
    const Real r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Real a = golden * static_cast<Real>(i);
    out.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  return out;
}

/// Far-field patterns in the normalization
///   E_sc(x) = e^{ik|x|} / (4 pi |x|) E_inf(xhat) + O(|x|^-2), same for H.
struct FarFieldData {
  em::MediumParams medium = em::MediumParams::normalized();
  DirectionGrid grid;
  std::vector<CVec3> E;
  std::vector<CVec3> H;

  std::size_t size() const { return grid.size(); }
  const std::vector<Vec3>& directions() const { return grid.directions; }

  /// Discrete L2 norm of E_inf over the sphere.
  Real l2_norm() const {
    Real acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += grid.weights[i] * E[i].squaredNorm();
    return std::sqrt(acc);
  }

  Real max_abs() const {
    Real m = 0.0;
    for (const auto& e : E) m = std::max(m, e.norm());
    for (const auto& h : H) m = std::max(m, h.norm());
    return m;
  }
};

/// Discrete L2 distance between the E patterns of two data sets on the same grid.
inline Real l2_distance(const FarFieldData& a, const FarFieldData& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l2_distance: grids differ");
  Real acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.grid.weights[i] * (a.E[i] - b.E[i]).squaredNorm();
  return std::sqrt(acc);
}

/// F(xhat) = int_S e^{-ik<xhat, y>} rho(y) ds(y).
inline CVec3 radiation_vector(const SurfaceCurrent& current, const Vec3& xhat,
                              const geometry::QuadratureRule& quad) {
  const ScreenMesh& mesh = current.mesh();
  const Real k = current.medium().k();
  CVec3 acc = CVec3::Zero();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& d = current.on_triangle(t);
    if (d.g == Complex{} && d.h.isZero(0.0)) continue;
    const Vec3 c = mesh.centroid(t);
    const Vec3 e1 = mesh.vertex(t, 1) - mesh.vertex(t, 0);
    const Vec3 e2 = mesh.vertex(t, 2) - mesh.vertex(t, 0);
    const Real jac = 2.0 * mesh.area(t);
    // Integrate relative to the centroid and pull the centroid phase out.
    Complex s0{0.0, 0.0};
    CVec3 s1 = CVec3::Zero();
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Vec3 rel = mesh.vertex(t, 0) - c + quad.points[q].x() * e1 + quad.points[q].y() * e2;
      const Complex w = quad.weights[q] * jac * std::exp(-I * (k * xhat.dot(rel)));
      s0 += w;
      s1 += w * to_complex(rel);
    }
    const CVec3 rho_c = d.g * to_complex(c) - d.h;
    acc += std::exp(-I * (k * xhat.dot(c))) * (d.g * s1 + rho_c * s0);
  }
  return acc;
}

inline constexpr int kDefaultFarFieldOrder = 12;

/// E_inf = i omega mu (F - xhat <xhat, F>), H_inf = i k xhat x F.
inline FarFieldData far_field(const SurfaceCurrent& current, const DirectionGrid& grid,
                              const geometry::QuadratureRule& quad = geometry::quadrature_rule(kDefaultFarFieldOrder)) {
  FarFieldData ff;
  ff.medium = current.medium();
  ff.grid = grid;
  ff.E.resize(grid.size());
  ff.H.resize(grid.size());
  const Real k = current.medium().k();
  const Complex e_scale = I * current.medium().omega() * current.medium().mu();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const Vec3& xhat = grid.directions[u];
    const CVec3 F = radiation_vector(current, xhat, quad);
    const CVec3 xc = to_complex(xhat);
    const CVec3 F_perp = F - xc * dot(xc, F);
    ff.E[u] = e_scale * F_perp;
    ff.H[u] = (I * k) * cross(xc, F);
  }
  return ff;
}

/// max |xhat . E_inf|, |xhat . H_inf| relative to the largest pattern value.
inline Real transversality_residual(const FarFieldData& ff) {
  const Real scale = ff.max_abs();
  if (scale == 0.0) return 0.0;
  Real worst = 0.0;
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const CVec3 xc = to_complex(ff.grid.directions[i]);
    worst = std::max({worst, std::abs(dot(xc, ff.E[i])), std::abs(dot(xc, ff.H[i]))});
  }
  return worst / scale;
}

/// max ||sqrt(eps) E_inf + sqrt(mu) xhat x H_inf|| / max ||sqrt(eps) E_inf||.
/// For eps = mu this is the relation eps E_inf = -mu xhat x H_inf.
inline Real impedance_residual(const FarFieldData& ff) {
  const Real se = std::sqrt(ff.medium.epsilon());
  const Real sm = std::sqrt(ff.medium.mu());
  Real num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const CVec3 xc = to_complex(ff.grid.directions[i]);
    num = std::max(num, (se * ff.E[i] + sm * cross(xc, ff.H[i])).norm());
    den = std::max(den, (se * ff.E[i]).norm());
  }
  return den == 0.0 ? 0.0 : num / den;
}

inline constexpr Real kImpedanceTolerance = 1e-12;

/// max over sample directions of |xhat x E_sc - sqrt(mu/eps) H_sc| * radius,
/// the outgoing radiation-condition combination on a sphere of the given radius.
inline Real silver_muller_residual(const SurfaceCurrent& current, Real radius, const std::vector<Vec3>& directions,
                                   const Vec3& center = Vec3::Zero()) {
  const Real z0 = current.medium().impedance();
  Real worst = 0.0;
  for (const auto& d : directions) {
    const Vec3 xhat = d.normalized();
    const EMField f = scattered_fields(current, center + radius * xhat);
    worst = std::max(worst, (cross(to_complex(xhat), f.E) - z0 * f.H).norm() * radius);
  }
  return worst;
}

inline Real silver_muller_residual(const SurfaceCurrent& current, Real radius, std::size_t samples) {
  return silver_muller_residual(current, radius, fibonacci_directions(samples));
}

// Text format of FarFieldData:
//   farfield 1
//   k <k>
//   omega <omega>
//   epsilon <eps>
//   mu <mu>
//   grid <full|upper|custom> <n_polar> <n_azimuth>
//   impedance_check <pass|fail> <residual>
//   count <N>
//   columns dir_x dir_y dir_z Einf_x_re Einf_x_im ... Hinf_z_re Hinf_z_im
//   r <15 numbers>        (N records)

inline void write_far_field(std::ostream& out, const FarFieldData& ff) {
  using io::format_real;
  const Real imp = impedance_residual(ff);
  out << "farfield 1\n";
  out << "k " << format_real(ff.medium.k()) << '\n';
  out << "omega " << format_real(ff.medium.omega()) << '\n';
  out << "epsilon " << format_real(ff.medium.epsilon()) << '\n';
  out << "mu " << format_real(ff.medium.mu()) << '\n';
  out << "grid " << to_string(ff.grid.kind) << ' ' << ff.grid.n_polar << ' ' << ff.grid.n_azimuth << '\n';
  out << "impedance_check " << (imp < kImpedanceTolerance ? "pass" : "fail") << ' ' << format_real(imp) << '\n';
  out << "count " << ff.size() << '\n';
  out << "columns dir_x dir_y dir_z"
         " Einf_x_re Einf_x_im Einf_y_re Einf_y_im Einf_z_re Einf_z_im"
         " Hinf_x_re Hinf_x_im Hinf_y_re Hinf_y_im Hinf_z_re Hinf_z_im\n";
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const Vec3& d = ff.grid.directions[i];
    out << "r " << format_real(d.x()) << ' ' << format_real(d.y()) << ' ' << format_real(d.z());
    for (const CVec3* v : {&ff.E[i], &ff.H[i]}) {
      for (int c = 0; c < 3; ++c) out << ' ' << format_real((*v)[c].real()) << ' ' << format_real((*v)[c].imag());
    }
    out << '\n';
  }
}

inline FarFieldData read_far_field(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Real> omega, eps, mu;
  std::optional<std::size_t> count;
  GridKind kind = GridKind::custom;
  int n_polar = 0, n_azimuth = 0;
  bool header = false;
  std::vector<Vec3> dirs;
  std::vector<CVec3> E, H;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    try {
      if (!header) {
        if (tok.size() != 2 || tok[0] != "farfield" || tok[1] != "1") throw std::runtime_error("expected 'farfield 1'");
        header = true;
      } else if (tok[0] == "r") {
        if (tok.size() != 16) throw std::runtime_error("record needs 15 numbers");
        std::vector<Real> v;
        for (std::size_t i = 1; i < tok.size(); ++i) v.push_back(io::parse_real(tok[i]));
        dirs.emplace_back(v[0], v[1], v[2]);
        E.emplace_back(Complex{v[3], v[4]}, Complex{v[5], v[6]}, Complex{v[7], v[8]});
        H.emplace_back(Complex{v[9], v[10]}, Complex{v[11], v[12]}, Complex{v[13], v[14]});
      } else if (tok[0] == "k" && tok.size() == 2) {
        io::parse_real(tok[1]);
      } else if (tok[0] == "omega" && tok.size() == 2) {
        omega = io::parse_real(tok[1]);
      } else if (tok[0] == "epsilon" && tok.size() == 2) {
        eps = io::parse_real(tok[1]);
      } else if (tok[0] == "mu" && tok.size() == 2) {
        mu = io::parse_real(tok[1]);
      } else if (tok[0] == "grid" && tok.size() == 4) {
        kind = grid_kind_from_string(tok[1]);
        n_polar = static_cast<int>(io::parse_int(tok[2]));
        n_azimuth = static_cast<int>(io::parse_int(tok[3]));
      } else if (tok[0] == "impedance_check" || tok[0] == "columns") {
        // informational
      } else if (tok[0] == "count" && tok.size() == 2) {
        count = static_cast<std::size_t>(io::parse_int(tok[1]));
      } else {
        throw std::runtime_error("unrecognized record '" + tok[0] + "'");
      }
    } catch (const std::exception& e) {
      throw io::ParseError(lineno, e.what());
    }
  }
  if (!header) throw std::runtime_error("read_far_field: empty input");
  if (!omega || !eps || !mu) throw std::runtime_error("read_far_field: missing omega/epsilon/mu header");
  if (count && *count != dirs.size()) throw std::runtime_error("read_far_field: record count does not match header");

  FarFieldData ff{em::MediumParams(*omega, *eps, *mu), {}, std::move(E), std::move(H)};
  if (kind != GridKind::custom) {
    ff.grid = DirectionGrid::make(kind, n_polar, n_azimuth);
    if (ff.grid.size() != dirs.size()) throw std::runtime_error("read_far_field: grid metadata does not match records");
    ff.grid.directions = std::move(dirs);
  } else {
    ff.grid = DirectionGrid::custom(std::move(dirs));
  }
  return ff;
}

inline void save_far_field(const std::string& path, const FarFieldData& ff) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_far_field(out, ff);
}

inline FarFieldData load_far_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_far_field(in);
}

}  // namespace screenbem::fields
