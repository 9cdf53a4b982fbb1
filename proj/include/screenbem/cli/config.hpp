#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "screenbem/em/medium.hpp"
#include "screenbem/em/plane_wave.hpp"
#include "screenbem/fields/far_field.hpp"
#include "screenbem/geometry/generators.hpp"
#include "screenbem/inverse/plane_fit.hpp"
#include "screenbem/inverse/support_image.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All lengths below are in wavelengths, lambda = 2 pi / k.

struct ScreenSpec {
  std::string shape = "rectangle";
  Real width = 1.0;
  Real height = 1.0;
  Real radius = 0.5;
  int nx = 8;
  int ny = 8;
  int refine = 3;
  Vec3 normal = Vec3::UnitZ();
  Real offset = 0.0;
};

struct WaveSpec {
  Vec3 direction = Vec3(0.3, 0.2, -1.0);
  Vec3 polarization = Vec3(1.0, 0.5, 0.2);
  Real amplitude = 1.0;
  Real omega = 2.0 * pi;
  Real epsilon = 1.0;
  Real mu = 1.0;
};

struct FarFieldSpec {
  fields::GridKind grid = fields::GridKind::full;
  int n_polar = 16;
  int n_azimuth = 32;
  int order = fields::kDefaultFarFieldOrder;
};

struct InverseSpec {
  Real tau = inverse::kDefaultSupportThreshold;
  Real full_support_tau = 1e-3;
  Real image_half_width = 1.5;
  Real image_spacing = 0.05;
  /// Imaging plane; the screen's plane when unset.
  std::optional<Vec3> plane_normal;
  std::optional<Real> plane_offset;
  Real max_offset = 1.0;
  Real angle_step = 10.0;  // degrees
  Real offset_step = 0.1;
  Real support_radius = 1.0;
  Real source_spacing = 0.25;
  bool refine = true;
  int max_iterations = 400;
};

struct SolverSpec {
  /// Regular-pair rule order; 0 keeps the default assembly settings.
  int quadrature_order = 0;
  Real residual_tolerance = 1e-10;
};

struct DemoSpec {
  std::optional<ScreenSpec> second;
  Real factor = 10.0;
  bool run_inverse = true;
};

struct OutputSpec {
  std::string mesh = "mesh.txt";
  std::string density = "density.txt";
  std::string farfield = "farfield.txt";
  std::string support = "support.txt";
  std::string plane = "plane.txt";
  std::string landscape = "landscape.txt";
  std::string report = "uniqueness.json";
};

struct RunConfig {
  ScreenSpec screen;
  WaveSpec wave;
  FarFieldSpec farfield;
  InverseSpec inverse;
  SolverSpec solver;
  DemoSpec demo;
  OutputSpec output;

  em::MediumParams medium() const { return {wave.omega, wave.epsilon, wave.mu}; }
  Real wavelength() const { return medium().wavelength(); }
  em::PlaneWaveSpec plane_wave() const { return {wave.direction, wave.polarization, wave.amplitude}; }
  geometry::PlaneFrame frame(const ScreenSpec& s) const { return {s.normal, s.offset * wavelength()}; }

  geometry::ScreenMesh build_mesh(const ScreenSpec& s) const {
    const Real lam = wavelength();
    if (s.shape == "rectangle") return geometry::make_rectangle_screen(s.width * lam, s.height * lam, s.nx, s.ny, frame(s));
    if (s.shape == "disk") return geometry::make_disk_screen(s.radius * lam, s.refine, frame(s));
    throw ConfigError("unknown screen shape '" + s.shape + "' (expected rectangle or disk)");
  }
  geometry::ScreenMesh build_mesh() const { return build_mesh(screen); }

  /// Same screen at half the mesh size.
  ScreenSpec refined(const ScreenSpec& s) const {
    ScreenSpec r = s;
    r.nx *= 2;
    r.ny *= 2;
    r.refine += 1;
    return r;
  }

  fields::DirectionGrid direction_grid() const {
    return fields::DirectionGrid::make(farfield.grid, farfield.n_polar, farfield.n_azimuth);
  }

  geometry::PlaneFrame imaging_frame() const {
    if (inverse.plane_normal) return {*inverse.plane_normal, inverse.plane_offset.value_or(0.0) * wavelength()};
    return frame(screen);
  }

  inverse::ImageGridSpec image_grid() const {
    inverse::ImageGridSpec g;
    g.half_width = inverse.image_half_width * wavelength();
    g.spacing = inverse.image_spacing * wavelength();
    return g;
  }

  inverse::PlaneSearchSpec plane_search() const {
    const Real lam = wavelength();
    inverse::PlaneSearchSpec s;
    s.max_offset = inverse.max_offset * lam;
    s.angle_step_deg = inverse.angle_step;
    s.offset_step = inverse.offset_step * lam;
    s.support_radius = inverse.support_radius * lam;
    s.source_spacing = inverse.source_spacing * lam;
    s.refine = inverse.refine;
    s.max_iterations = inverse.max_iterations;
    s.tolerance = 1e-6 * lam;
    return s;
  }

  void validate() const;
};

namespace detail {

inline Real parse_real_value(const std::string& key, const std::string& v) {
  try {
    const auto tok = io::split_ws(v);
    if (tok.size() != 1) throw std::invalid_argument("expected one number");
    return io::parse_real(tok[0]);
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

inline int parse_int_value(const std::string& key, const std::string& v) {
  try {
    const auto tok = io::split_ws(v);
    if (tok.size() != 1) throw std::invalid_argument("expected one integer");
    return static_cast<int>(io::parse_int(tok[0]));
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

inline bool parse_bool_value(const std::string& key, const std::string& v) {
  const auto tok = io::split_ws(v);
  if (tok.size() == 1 && (tok[0] == "true" || tok[0] == "yes" || tok[0] == "1")) return true;
  if (tok.size() == 1 && (tok[0] == "false" || tok[0] == "no" || tok[0] == "0")) return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

inline Vec3 parse_vec3_value(const std::string& key, const std::string& v) {
  const auto tok = io::split_ws(v);
  if (tok.size() != 3) throw ConfigError("key '" + key + "': expected three numbers");
  try {
    return {io::parse_real(tok[0]), io::parse_real(tok[1]), io::parse_real(tok[2])};
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

inline std::string parse_word_value(const std::string& key, const std::string& v) {
  const auto tok = io::split_ws(v);
  if (tok.size() != 1) throw ConfigError("key '" + key + "': expected a single word");
  return tok[0];
}

inline void apply_screen(ScreenSpec& s, const std::string& section, const std::string& key, const std::string& v) {
  const std::string name = section + "." + key;
  if (key == "shape") s.shape = parse_word_value(name, v);
  else if (key == "width") s.width = parse_real_value(name, v);
  else if (key == "height") s.height = parse_real_value(name, v);
  else if (key == "radius") s.radius = parse_real_value(name, v);
  else if (key == "nx") s.nx = parse_int_value(name, v);
  else if (key == "ny") s.ny = parse_int_value(name, v);
  else if (key == "refine") s.refine = parse_int_value(name, v);
  else if (key == "normal") s.normal = parse_vec3_value(name, v);
  else if (key == "offset") s.offset = parse_real_value(name, v);
  else throw ConfigError("unknown key '" + name + "'");
}

inline void validate_screen(const ScreenSpec& s, const std::string& section) {
  if (s.shape != "rectangle" && s.shape != "disk") {
    throw ConfigError(section + ".shape: unknown screen shape '" + s.shape + "' (expected rectangle or disk)");
  }
  if (!(s.width > 0.0) || !(s.height > 0.0) || !(s.radius > 0.0)) {
    throw ConfigError(section + ": width, height and radius must be positive");
  }
  if (s.nx < 1 || s.ny < 1) throw ConfigError(section + ": nx and ny must be >= 1");
  if (s.refine < 0 || s.refine > 8) throw ConfigError(section + ".refine must lie in [0, 8]");
  if (!(s.normal.norm() > 0.0)) throw ConfigError(section + ".normal must be nonzero");
  if (!std::isfinite(s.offset)) throw ConfigError(section + ".offset must be finite");
}

}  // namespace detail

inline void RunConfig::validate() const {
  detail::validate_screen(screen, "screen");
  if (demo.second) detail::validate_screen(*demo.second, "screen2");
  try {
    (void)medium();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("wave: ") + e.what());
  }
  if (!(wave.direction.norm() > 0.0) || !(wave.polarization.norm() > 0.0)) {
    throw ConfigError("wave: direction and polarization must be nonzero");
  }
  if (!std::isfinite(wave.amplitude)) throw ConfigError("wave.amplitude must be finite");
  if (farfield.n_polar < 1 || farfield.n_azimuth < 1) throw ConfigError("farfield: counts must be >= 1");
  if (farfield.order < 1 || farfield.order > geometry::kMaxQuadratureOrder) {
    throw ConfigError("farfield.order must lie in [1, " + std::to_string(geometry::kMaxQuadratureOrder) + "]");
  }
  if (!(inverse.tau > 0.0 && inverse.tau < 1.0)) throw ConfigError("inverse.tau must lie in (0, 1)");
  if (!(inverse.full_support_tau > 0.0 && inverse.full_support_tau < 1.0)) {
    throw ConfigError("inverse.full_support_tau must lie in (0, 1)");
  }
  if (!(inverse.image_half_width > 0.0)) throw ConfigError("inverse.image_half_width must be positive");
  if (!(inverse.image_spacing > 0.0) || inverse.image_spacing > 0.25) {
    throw ConfigError("inverse.image_spacing must lie in (0, 0.25] wavelengths");
  }
  if (inverse.plane_normal && !(inverse.plane_normal->norm() > 0.0)) {
    throw ConfigError("inverse.plane_normal must be nonzero");
  }
  try {
    plane_search().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("inverse: ") + e.what());
  }
  if (solver.quadrature_order != 0 && (solver.quadrature_order < 2 || solver.quadrature_order > 27)) {
    throw ConfigError("solver.quadrature_order must be 0 (default) or lie in [2, 27]");
  }
  if (!(solver.residual_tolerance > 0.0)) throw ConfigError("solver.residual_tolerance must be positive");
  if (!(demo.factor > 0.0)) throw ConfigError("demo.factor must be positive");
}

/// Drops `;` and `#` comments, including trailing ones after a value.
inline std::string strip_comments(std::istream& in) {
  std::string out, line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of(";#");
    if (cut != std::string::npos) line.erase(cut);
    out += line;
    out += '\n';
  }
  return out;
}

/// Parses the sectioned key = value format. Unknown sections or keys are
/// errors; missing keys keep their defaults.
inline RunConfig parse_config(std::istream& raw) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(strip_comments(raw));
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("key '" + section + "' outside a section");
    }
    for (const auto& [key, node] : body) {
      const std::string& v = node.data();
      const std::string name = section + "." + key;
      if (section == "screen") {
        detail::apply_screen(cfg.screen, section, key, v);
      } else if (section == "screen2") {
        if (!cfg.demo.second) cfg.demo.second = ScreenSpec{};
        detail::apply_screen(*cfg.demo.second, section, key, v);
      } else if (section == "wave") {
        if (key == "direction") cfg.wave.direction = detail::parse_vec3_value(name, v);
        else if (key == "polarization") cfg.wave.polarization = detail::parse_vec3_value(name, v);
        else if (key == "amplitude") cfg.wave.amplitude = detail::parse_real_value(name, v);
        else if (key == "omega") cfg.wave.omega = detail::parse_real_value(name, v);
        else if (key == "epsilon") cfg.wave.epsilon = detail::parse_real_value(name, v);
        else if (key == "mu") cfg.wave.mu = detail::parse_real_value(name, v);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "farfield") {
        if (key == "grid") {
          try {
            cfg.farfield.grid = fields::grid_kind_from_string(detail::parse_word_value(name, v));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(name + ": " + e.what());
          }
          if (cfg.farfield.grid == fields::GridKind::custom) throw ConfigError(name + ": expected full or upper");
        } else if (key == "n_polar") cfg.farfield.n_polar = detail::parse_int_value(name, v);
        else if (key == "n_azimuth") cfg.farfield.n_azimuth = detail::parse_int_value(name, v);
        else if (key == "order") cfg.farfield.order = detail::parse_int_value(name, v);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "inverse") {
        auto& s = cfg.inverse;
        if (key == "tau") s.tau = detail::parse_real_value(name, v);
        else if (key == "full_support_tau") s.full_support_tau = detail::parse_real_value(name, v);
        else if (key == "image_half_width") s.image_half_width = detail::parse_real_value(name, v);
        else if (key == "image_spacing") s.image_spacing = detail::parse_real_value(name, v);
        else if (key == "plane_normal") s.plane_normal = detail::parse_vec3_value(name, v);
        else if (key == "plane_offset") s.plane_offset = detail::parse_real_value(name, v);
        else if (key == "max_offset") s.max_offset = detail::parse_real_value(name, v);
        else if (key == "angle_step") s.angle_step = detail::parse_real_value(name, v);
        else if (key == "offset_step") s.offset_step = detail::parse_real_value(name, v);
        else if (key == "support_radius") s.support_radius = detail::parse_real_value(name, v);
        else if (key == "source_spacing") s.source_spacing = detail::parse_real_value(name, v);
        else if (key == "refine") s.refine = detail::parse_bool_value(name, v);
        else if (key == "max_iterations") s.max_iterations = detail::parse_int_value(name, v);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "solver") {
        if (key == "quadrature_order") cfg.solver.quadrature_order = detail::parse_int_value(name, v);
        else if (key == "residual_tolerance") cfg.solver.residual_tolerance = detail::parse_real_value(name, v);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "demo") {
        if (key == "factor") cfg.demo.factor = detail::parse_real_value(name, v);
        else if (key == "inverse") cfg.demo.run_inverse = detail::parse_bool_value(name, v);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "output") {
        const std::string path = detail::parse_word_value(name, v);
        auto& o = cfg.output;
        if (key == "mesh") o.mesh = path;
        else if (key == "density") o.density = path;
        else if (key == "farfield") o.farfield = path;
        else if (key == "support") o.support = path;
        else if (key == "plane") o.plane = path;
        else if (key == "landscape") o.landscape = path;
        else if (key == "report") o.report = path;
        else throw ConfigError("unknown key '" + name + "'");
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace screenbem::cli
